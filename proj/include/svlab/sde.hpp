#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "svlab/model.hpp"
#include "svlab/rng.hpp"

namespace svlab {

struct SimConfig {
  double dt = 0;
  double t_end = 0;
  std::int64_t n_paths = 1;
  std::uint64_t seed = 0;
  std::int64_t record_stride = 1;         // store every k-th step
  double initial_x = 0;
  std::optional<double> initial_s;        // default: sigma (Algebraic), 0 (ExpOU)
  std::size_t memory_cap_bytes = std::size_t(2) << 30;
  // Stein-Stein exception: with gamma = 1 and alpha = beta = 0 the process is
  // well defined on the whole line, so the reflecting boundary can be
  // switched off.
  bool allow_negative_s = false;
};

struct PathEnsemble {
  ModelSpec spec;
  SimConfig config;
  std::vector<double> times;  // uniform grid, times[k] = k * record_stride * dt
  std::int64_t n_paths = 0;
  std::vector<double> x;  // [path * n_rec + k]
  std::vector<double> s;

  std::size_t n_rec() const { return times.size(); }
  double x_at(std::int64_t path, std::size_t k) const { return x[path * times.size() + k]; }
  double s_at(std::int64_t path, std::size_t k) const { return s[path * times.size() + k]; }
};

struct ReturnSample {
  double delta_t = 0;
  std::vector<double> values;  // non-overlapping increments pooled across paths
};

// Precompiled per-spec coefficients for the hot loop. pow() collapses to
// sqrt/multiplications for the half-integer exponents the family uses.
struct StepCoeffs {
  bool expou = false;
  bool reflect = true;
  double a = 0, sigma = 0, g = 0;
  double alpha = 0, beta = 0, gamma = 0;
  int alpha_kind = 0, beta_kind = 0, gamma_kind = 0;  // rpow dispatch
};

StepCoeffs make_step_coeffs(const ModelSpec& spec, bool allow_negative_s = false);

struct State {
  double x = 0, s = 0;
};

// One Euler-Maruyama step (Ito convention). Algebraic kind evaluates the
// coefficients at s_eff = max(s, 0) and reflects the update, s' = |s_raw|,
// which realizes the reflecting boundary at S = 0.
State step(const State& st, const StepCoeffs& c, double dt, const NormalPair& noises);
State step(const State& st, const ModelSpec& spec, double dt, const NormalPair& noises);

void validate_config(const ModelSpec& spec, const SimConfig& cfg);

// Simulates n_paths trajectories. The noise stream of path p is a pure
// function of (seed, p), so results are bit-identical for any thread count.
PathEnsemble simulate_paths(const ModelSpec& spec, const SimConfig& cfg, int threads = 1);

// Non-overlapping increments X_{t+dt} - X_t from the stationary segment
// (t >= burn_in), pooled across paths.
ReturnSample extract_returns(const PathEnsemble& ens, double delta_t, double burn_in);

struct EnsembleStats {
  double mean_s = 0, mean_s2 = 0;       // pooled over t >= burn_in
  double stderr_s = 0, stderr_s2 = 0;   // from per-path means
  double min_s = 0;
  double final_var_x = 0;               // across paths at t_end
  std::size_t n_used = 0;
};

EnsembleStats ensemble_stats(const PathEnsemble& ens, double burn_in);

}  // namespace svlab
