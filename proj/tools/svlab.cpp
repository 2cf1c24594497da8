// svlab -- batch front-end for the stochastic-volatility laboratory.
//
// Subcommands: simulate, moments, stationary, short-time, acf, verify.
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "svlab/acf.hpp"
#include "svlab/density.hpp"
#include "svlab/error.hpp"
#include "svlab/estimators.hpp"
#include "svlab/io.hpp"
#include "svlab/moments.hpp"
#include "svlab/sde.hpp"
#include "svlab/short_time.hpp"
#include "svlab/verify.hpp"
#include "svlab/version.hpp"

namespace {

using svlab::fmt_double;

struct CommonOpts {
  std::string preset;
  std::string kind = "algebraic";
  std::string alpha, beta, gamma;
  double a = std::nan(""), sigma = std::nan(""), g = std::nan("");
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir = "svlab_out";
  std::string config_file;
};

// Flat key=value config support: the file mirrors the long flags of the
// chosen subcommand; explicit command-line flags win over file entries.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> tokens(argv + 1, argv + argc);
  std::string file;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == "--config" && i + 1 < tokens.size()) file = tokens[i + 1];
    if (tokens[i].rfind("--config=", 0) == 0) file = tokens[i].substr(9);
  }
  if (file.empty()) return tokens;

  std::ifstream in(file);
  if (!in) svlab::fail(svlab::Errc::InvalidConfig, "cannot read config file '" + file + "'");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& t : tokens)
      if (t == flag || t.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      svlab::fail(svlab::Errc::InvalidConfig, "config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config" || given(key)) continue;
    if (value == "true" || value == "yes") {
      extra.push_back("--" + key);
    } else if (value == "false" || value == "no") {
      // absent flag
    } else {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  // insert right after the subcommand token
  std::size_t sub = 0;
  while (sub < tokens.size() && tokens[sub].rfind("--", 0) == 0) ++sub;
  tokens.insert(tokens.begin() + std::min(sub + 1, tokens.size()), extra.begin(), extra.end());
  return tokens;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--preset", o.preset,
                  "named model: stein-stein, ou, heston, garch, geometric-ou, three-halves, "
                  "expou");
  cmd->add_option("--kind", o.kind, "algebraic or expou (when no preset is given)");
  cmd->add_option("--alpha", o.alpha, "drift exponent, rational p/q");
  cmd->add_option("--beta", o.beta, "noise exponent, rational p/q");
  cmd->add_option("--gamma", o.gamma, "price exponent, rational p/q");
  cmd->add_option("--a", o.a, "mean-reversion rate");
  cmd->add_option("--sigma", o.sigma, "volatility level");
  cmd->add_option("--g", o.g, "noise amplitude");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--config", o.config_file, "flat key=value config file mirroring these flags");
}

svlab::ModelSpec build_spec(const CommonOpts& o) {
  svlab::ModelSpec spec;
  if (!o.preset.empty()) {
    spec = svlab::preset(o.preset);
  } else if (o.kind == "expou") {
    spec = svlab::ModelSpec::expou(std::nan(""), std::nan(""), std::nan(""));
  } else if (o.kind == "algebraic") {
    spec.kind = svlab::ModelKind::Algebraic;
  } else {
    svlab::fail(svlab::Errc::InvalidConfig, "unknown kind '" + o.kind + "'");
  }
  if (!o.alpha.empty()) spec.alpha = svlab::parse_rational(o.alpha);
  if (!o.beta.empty()) spec.beta = svlab::parse_rational(o.beta);
  if (!o.gamma.empty()) spec.gamma = svlab::parse_rational(o.gamma);
  if (!std::isnan(o.a)) spec.a = o.a;
  if (!std::isnan(o.sigma)) spec.sigma = o.sigma;
  if (!std::isnan(o.g)) spec.g = o.g;
  if (std::isnan(spec.a) || std::isnan(spec.sigma) || std::isnan(spec.g))
    svlab::fail(svlab::Errc::InvalidConfig, "a, sigma, g must all be given (presets leave them open)");
  return spec;
}

int resolve_threads(int t) {
  if (t > 0) return t;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

svlab::Manifest make_manifest(const std::string& command, const svlab::ModelSpec& spec,
                              const CommonOpts& o) {
  svlab::Manifest man;
  man.command = command;
  man.set("version", std::string(svlab::kVersion));
  man.set("spec", svlab::describe(spec));
  man.set("seed", static_cast<long long>(o.seed));
  return man;
}

void ensure_out(const std::string& dir) { std::filesystem::create_directories(dir); }

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonOpts& o, double dt, double t_end, std::int64_t paths,
                 std::int64_t stride, double burn_in, bool dump_paths, bool unbounded) {
  const svlab::ModelSpec spec = build_spec(o);
  svlab::SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.n_paths = paths;
  cfg.seed = o.seed;
  cfg.record_stride = stride;
  cfg.allow_negative_s = unbounded;
  const auto t0 = std::chrono::steady_clock::now();
  const svlab::PathEnsemble ens = svlab::simulate_paths(spec, cfg, resolve_threads(o.threads));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (burn_in < 0) burn_in = 10.0 / spec.a;
  burn_in = std::min(burn_in, 0.5 * t_end);
  const svlab::EnsembleStats st = svlab::ensemble_stats(ens, burn_in);

  ensure_out(o.out_dir);
  nlohmann::ordered_json j;
  j["spec"] = svlab::describe(spec);
  j["seed"] = o.seed;
  j["dt"] = dt;
  j["t_end"] = t_end;
  j["paths"] = paths;
  j["burn_in"] = burn_in;
  j["mean_s"] = st.mean_s;
  j["stderr_s"] = st.stderr_s;
  j["mean_s2"] = st.mean_s2;
  j["stderr_s2"] = st.stderr_s2;
  j["min_s"] = st.min_s;
  j["final_var_x"] = st.final_var_x;
  j["runtime_sec"] = secs;
  svlab::write_text(o.out_dir + "/simulate_summary.json", j.dump(2) + "\n");

  if (dump_paths) {
    std::vector<std::string> rows;
    rows.reserve(ens.times.size() * std::size_t(ens.n_paths));
    for (std::int64_t p = 0; p < ens.n_paths; ++p)
      for (std::size_t k = 0; k < ens.times.size(); ++k)
        rows.push_back(fmt_double(ens.times[k]) + "," + std::to_string(p) + "," +
                       fmt_double(ens.x_at(p, k)) + "," + fmt_double(ens.s_at(p, k)));
    auto man = make_manifest("simulate", spec, o);
    man.set("dt", dt).set("t_end", t_end).set("paths", static_cast<long long>(paths));
    svlab::write_csv(o.out_dir + "/paths.csv", man, "t,path_id,x,s", rows);
  }
  std::cout << "simulate: <S> = " << st.mean_s << " +- " << st.stderr_s
            << ", <S^2> = " << st.mean_s2 << " +- " << st.stderr_s2 << ", min S = " << st.min_s
            << ", runtime " << secs << " s\n";
  return 0;
}

// ----------------------------------------------------------------- moments

int cmd_moments(const CommonOpts& o, int max_m, int max_n, double t_max, int points,
                double s0) {
  const svlab::ModelSpec spec = build_spec(o);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = t_max * i / double(points - 1);
  const double start_s = std::isnan(s0) ? spec.sigma : s0;
  const svlab::MomentTrajectory tr =
      svlab::evolve_moments(spec, max_m, max_n, grid, svlab::MomentTable::point(0.0, start_s));

  ensure_out(o.out_dir);
  std::vector<std::string> rows;
  for (const auto& s : tr.series) {
    const char* status = s.status == svlab::MomentStatus::Divergent ? "divergent" : "finite";
    for (std::size_t k = 0; k < tr.t.size(); ++k)
      rows.push_back(fmt_double(tr.t[k]) + "," + std::to_string(s.index.m) + "," +
                     std::to_string(s.index.n) + "," + fmt_double(s.values[k]) + "," + status);
  }
  auto man = make_manifest("moments", spec, o);
  man.set("max_m", static_cast<long long>(max_m)).set("max_n", static_cast<long long>(max_n));
  svlab::write_csv(o.out_dir + "/moments.csv", man, "t,m,n,value,status", rows);

  std::vector<std::string> lrows;
  for (int l = 0; 2 * l <= max_m; ++l)
    for (int n = 0; n <= max_n; ++n) {
      const svlab::MomentValue v = svlab::longtime_limit(spec, l, n);
      lrows.push_back(std::to_string(l) + "," + std::to_string(n) + "," +
                      (v.finite() ? fmt_double(v.value) : "nan") + "," +
                      (v.finite() ? "finite" : "divergent"));
    }
  svlab::write_csv(o.out_dir + "/longtime.csv", man, "l,n,value,status", lrows);
  std::cout << "moments: wrote " << rows.size() << " trajectory rows to " << o.out_dir << "\n";
  return 0;
}

// -------------------------------------------------------------- stationary

int cmd_stationary(const CommonOpts& o, int max_check_n) {
  const svlab::ModelSpec spec = build_spec(o);
  const svlab::DensityCurve curve = svlab::normalize(spec);
  ensure_out(o.out_dir);

  std::vector<std::string> rows;
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const double s = curve.grid[i];
    rows.push_back(fmt_double(s) + "," + fmt_double(curve.pdf(s)) + "," +
                   fmt_double(curve.cdf(s)));
  }
  auto man = make_manifest("stationary", spec, o);
  svlab::write_csv(o.out_dir + "/density.csv", man, "s,pdf,cdf", rows);

  std::vector<std::string> mrows;
  for (int n = 1; n <= max_check_n; ++n) {
    std::string closed = "n/a", quad = "n/a";
    try {
      const svlab::MomentValue mv = svlab::stationary_s_moment(spec, n);
      closed = mv.finite() ? fmt_double(mv.value) : "divergent";
    } catch (const svlab::Error&) {
    }
    try {
      quad = fmt_double(svlab::stationary_moment_check(curve, n));
    } catch (const svlab::Error& e) {
      if (e.code() == svlab::Errc::MomentDiverges)
        quad = "divergent";
      else
        throw;
    }
    mrows.push_back(std::to_string(n) + "," + closed + "," + quad);
  }
  svlab::write_csv(o.out_dir + "/moment_checks.csv", man, "n,closed_form,quadrature", mrows);
  std::cout << "stationary: Z = " << std::exp(curve.log_norm) << ", support [" << fmt_double(curve.support.first)
            << ", " << fmt_double(curve.support.second) << "]\n";
  return 0;
}

// -------------------------------------------------------------- short-time

int cmd_short_time(const CommonOpts& o, double delta_t, double y_min, double y_max, int points) {
  const svlab::ModelSpec spec = build_spec(o);
  if (delta_t <= 0) delta_t = 0.01 / spec.a;
  svlab::ShortTime st(spec);
  ensure_out(o.out_dir);
  std::vector<std::string> rows;
  for (int i = 0; i < points; ++i) {
    const double y = y_min * std::pow(y_max / y_min, i / double(points - 1));
    const double dx = y * std::sqrt(delta_t);
    const double lq = st.log_mixing_density(dx, delta_t);
    std::string asy = "nan", ratio = "nan";
    try {
      const double la = st.log_tail_asymptote(dx, delta_t);
      asy = fmt_double(std::exp(la));
      ratio = fmt_double(la - lq);
    } catch (const svlab::Error&) {
      // degenerate classes keep the quadrature column only
    }
    rows.push_back(fmt_double(dx) + "," + fmt_double(std::exp(lq)) + "," + asy + "," + ratio);
  }
  auto man = make_manifest("short-time", spec, o);
  man.set("delta_t", delta_t);
  svlab::write_csv(o.out_dir + "/short_time.csv", man, "dx,pdf_quadrature,pdf_asymptote,log_ratio",
                   rows);
  std::cout << "short-time: wrote " << rows.size() << " rows to " << o.out_dir << "\n";
  return 0;
}

// --------------------------------------------------------------------- acf

int cmd_acf(const CommonOpts& o, int u, int v, double max_lag, double lag_step, double dt,
            double t_end, std::int64_t paths) {
  const svlab::ModelSpec spec = build_spec(o);
  std::vector<double> lags;
  for (double lag = 0; lag <= max_lag + 1e-12; lag += lag_step) lags.push_back(lag);

  const svlab::AcfCurve an = svlab::analytic_acf(spec, u, v, lags);

  svlab::SimConfig cfg;
  cfg.dt = dt > 0 ? dt : 1e-3 / spec.a;
  cfg.t_end = t_end > 0 ? t_end : 30.0 / spec.a;
  cfg.n_paths = paths;
  cfg.seed = o.seed;
  cfg.record_stride = std::max<std::int64_t>(1, std::llround(lag_step / cfg.dt));
  const svlab::PathEnsemble ens = svlab::simulate_paths(spec, cfg, resolve_threads(o.threads));
  svlab::AcfCurve em = svlab::empirical_acf(ens, u, v, lags, 10.0 / spec.a);
  em.asymptote = an.asymptote;

  ensure_out(o.out_dir);
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < lags.size(); ++i)
    rows.push_back(fmt_double(lags[i]) + "," + fmt_double(an.values[i]) + ",0,analytic");
  for (std::size_t i = 0; i < lags.size(); ++i)
    rows.push_back(fmt_double(lags[i]) + "," + fmt_double(em.values[i]) + "," +
                   fmt_double(em.stderrs[i]) + ",empirical");
  auto man = make_manifest("acf", spec, o);
  man.set("u", static_cast<long long>(u)).set("v", static_cast<long long>(v));
  svlab::write_csv(o.out_dir + "/acf.csv", man, "lag,value,stderr,source", rows);

  const svlab::DecayFit fa = svlab::fit_decay_rate(an, 0.0, 2.0 / spec.a);
  const svlab::DecayFit fe = svlab::fit_decay_rate(em, 0.0, 2.0 / spec.a);
  std::cout << "acf: analytic rate " << fa.rate << ", empirical rate " << fe.rate << " +- "
            << fe.stderr << " (a = " << spec.a << ")\n";
  return 0;
}

// ------------------------------------------------------------------ verify

int cmd_verify(const CommonOpts& o, std::int64_t paths, double t_end_factor) {
  const svlab::ModelSpec spec = build_spec(o);
  svlab::VerifyOptions vo;
  vo.seed = o.seed;
  vo.threads = resolve_threads(o.threads);
  vo.n_paths = paths;
  vo.t_end_factor = t_end_factor;
  vo.out_dir = o.out_dir;
  const auto results = svlab::run_verification(spec, vo);
  bool all_pass = true;
  std::printf("%-36s %-6s %-14s %-14s %s\n", "check", "result", "measured", "bound", "detail");
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    std::printf("%-36s %-6s %-14.6g %-14.6g %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.measured, r.bound, r.detail.c_str());
  }
  std::printf("verify: %s\n", all_pass ? "ALL PASS" : "FAILURES PRESENT");
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"svlab -- stochastic volatility laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(svlab::kVersion));

  CommonOpts sim_o, mom_o, sta_o, sht_o, acf_o, ver_o;

  auto* sim = app.add_subcommand("simulate", "integrate the coupled SDEs");
  add_common(sim, sim_o);
  double sim_dt = 1e-3, sim_tend = 50, sim_burn = -1;
  std::int64_t sim_paths = 1000, sim_stride = 100;
  bool sim_dump = false, sim_unbounded = false;
  sim->add_option("--dt", sim_dt, "time step");
  sim->add_option("--t-end", sim_tend, "horizon");
  sim->add_option("--paths", sim_paths, "number of paths");
  sim->add_option("--stride", sim_stride, "record every k-th step");
  sim->add_option("--burn-in", sim_burn, "stationary cutoff (default 10/a)");
  sim->add_flag("--dump-paths", sim_dump, "write every recorded sample to paths.csv");
  sim->add_flag("--unbounded-s", sim_unbounded,
                "disable the reflecting boundary (alpha = beta = 0, gamma = 1 only)");

  auto* mom = app.add_subcommand("moments", "moment-chain trajectories and long-time limits");
  add_common(mom, mom_o);
  int mom_max_m = 4, mom_max_n = 4, mom_points = 201;
  double mom_tmax = 10, mom_s0 = std::nan("");
  mom->add_option("--max-m", mom_max_m, "largest price power");
  mom->add_option("--max-n", mom_max_n, "largest volatility power");
  mom->add_option("--t-max", mom_tmax, "end of the time grid");
  mom->add_option("--grid-points", mom_points, "time grid resolution");
  mom->add_option("--initial-s", mom_s0, "initial volatility (default sigma)");

  auto* sta = app.add_subcommand("stationary", "stationary volatility density");
  add_common(sta, sta_o);
  int sta_max_n = 4;
  sta->add_option("--check-moments", sta_max_n, "compare moments up to this order");

  auto* sht = app.add_subcommand("short-time", "return density: quadrature vs asymptote");
  add_common(sht, sht_o);
  double sht_dt = -1, sht_ymin = 1, sht_ymax = 30;
  int sht_points = 25;
  sht->add_option("--delta-t", sht_dt, "return lag (default 0.01/a)");
  sht->add_option("--y-min", sht_ymin, "smallest |dx|/sqrt(dt)");
  sht->add_option("--y-max", sht_ymax, "largest |dx|/sqrt(dt)");
  sht->add_option("--points", sht_points, "log-spaced evaluation count");

  auto* acf = app.add_subcommand("acf", "stationary autocorrelation, analytic vs empirical");
  add_common(acf, acf_o);
  int acf_u = 1, acf_v = 1;
  double acf_max_lag = 5, acf_lag_step = 0.25, acf_dt = -1, acf_tend = -1;
  std::int64_t acf_paths = 2000;
  acf->add_option("--u", acf_u, "left order");
  acf->add_option("--v", acf_v, "right order");
  acf->add_option("--max-lag", acf_max_lag, "largest lag");
  acf->add_option("--lag-step", acf_lag_step, "lag spacing");
  acf->add_option("--dt", acf_dt, "time step (default 1e-3/a)");
  acf->add_option("--t-end", acf_tend, "horizon (default 30/a)");
  acf->add_option("--paths", acf_paths, "ensemble size");

  auto* ver = app.add_subcommand("verify", "run the verification suite for a model");
  add_common(ver, ver_o);
  std::int64_t ver_paths = 3000;
  double ver_tend_factor = 30;
  ver->add_option("--paths", ver_paths, "ensemble size for the simulation checks");
  ver->add_option("--t-end-factor", ver_tend_factor, "horizon in units of 1/a");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const svlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_o, sim_dt, sim_tend, sim_paths, sim_stride, sim_burn, sim_dump,
                          sim_unbounded);
    if (mom->parsed()) return cmd_moments(mom_o, mom_max_m, mom_max_n, mom_tmax, mom_points, mom_s0);
    if (sta->parsed()) return cmd_stationary(sta_o, sta_max_n);
    if (sht->parsed()) return cmd_short_time(sht_o, sht_dt, sht_ymin, sht_ymax, sht_points);
    if (acf->parsed())
      return cmd_acf(acf_o, acf_u, acf_v, acf_max_lag, acf_lag_step, acf_dt, acf_tend, acf_paths);
    if (ver->parsed()) return cmd_verify(ver_o, ver_paths, ver_tend_factor);
  } catch (const svlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return svlab::errc_is_usage(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
