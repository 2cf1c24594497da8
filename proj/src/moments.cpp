#include "svlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svlab/special.hpp"

namespace svlab {

namespace {

constexpr double kOverflowGuard = 1e12;

// Dense lower-triangular matrix helpers for the moment generator. The
// propagator exp(A h) of a lower-triangular A is itself lower triangular, and
// entries that are structurally zero (no dependency path) stay exactly zero,
// so finite moments never pick up contributions from divergent ones.
struct Tri {
  int n = 0;
  std::vector<double> a;  // row-major, only i >= j used
  explicit Tri(int n_) : n(n_), a(std::size_t(n_) * n_, 0.0) {}
  double& at(int i, int j) { return a[std::size_t(i) * n + j]; }
  double at(int i, int j) const { return a[std::size_t(i) * n + j]; }
};

Tri tri_mul(const Tri& x, const Tri& y) {
  Tri z(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0;
      for (int k = j; k <= i; ++k) {
        const double xv = x.at(i, k);
        // structural zeros must stay exact even when the other factor has
        // overflowed in a divergent block (0 * inf would poison finite rows)
        if (xv != 0.0) s += xv * y.at(k, j);
      }
      z.at(i, j) = s;
    }
  return z;
}

Tri tri_scale_add(const Tri& x, double cx, const Tri& y, double cy, double diag) {
  Tri z(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j <= i; ++j) z.at(i, j) = cx * x.at(i, j) + cy * y.at(i, j);
  for (int i = 0; i < x.n; ++i) z.at(i, i) += diag;
  return z;
}

// Solve L X = B with L lower triangular (forward substitution per column).
Tri tri_solve(const Tri& l, const Tri& b) {
  Tri x(l.n);
  for (int j = 0; j < l.n; ++j) {
    for (int i = j; i < l.n; ++i) {
      double s = b.at(i, j);
      for (int k = j; k < i; ++k) s -= l.at(i, k) * x.at(k, j);
      x.at(i, j) = s / l.at(i, i);
    }
  }
  return x;
}

double tri_norm1(const Tri& x) {
  double best = 0;
  for (int j = 0; j < x.n; ++j) {
    double col = 0;
    for (int i = j; i < x.n; ++i) col += std::abs(x.at(i, j));
    best = std::max(best, col);
  }
  return best;
}

// Pade(13) with scaling and squaring. For a triangular matrix the linear
// solve in the Pade step is an exact forward substitution, no pivoting.
Tri tri_expm(const Tri& a) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const double norm = tri_norm1(a);
  int squarings = 0;
  double scale = 1.0;
  if (norm > 2.0) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 2.0)));
    scale = std::ldexp(1.0, -squarings);
  }
  Tri as = tri_scale_add(a, scale, a, 0.0, 0.0);

  const Tri a2 = tri_mul(as, as);
  const Tri a4 = tri_mul(a2, a2);
  const Tri a6 = tri_mul(a2, a4);

  // U = A (a6 (b13 a6 + b11 a4 + b9 a2) + b7 a6 + b5 a4 + b3 a2 + b1 I)
  Tri w = tri_scale_add(a6, b[13], a4, b[11], 0.0);
  w = tri_scale_add(w, 1.0, a2, b[9], 0.0);
  w = tri_mul(a6, w);
  w = tri_scale_add(w, 1.0, a6, b[7], 0.0);
  w = tri_scale_add(w, 1.0, a4, b[5], 0.0);
  w = tri_scale_add(w, 1.0, a2, b[3], b[1]);
  const Tri u = tri_mul(as, w);

  // V = a6 (b12 a6 + b10 a4 + b8 a2) + b6 a6 + b4 a4 + b2 a2 + b0 I
  Tri v = tri_scale_add(a6, b[12], a4, b[10], 0.0);
  v = tri_scale_add(v, 1.0, a2, b[8], 0.0);
  v = tri_mul(a6, v);
  v = tri_scale_add(v, 1.0, a6, b[6], 0.0);
  v = tri_scale_add(v, 1.0, a4, b[4], 0.0);
  v = tri_scale_add(v, 1.0, a2, b[2], b[0]);

  const Tri num = tri_scale_add(v, 1.0, u, 1.0, 0.0);   // V + U
  const Tri den = tri_scale_add(v, 1.0, u, -1.0, 0.0);  // V - U
  Tri r = tri_solve(den, num);
  for (int s = 0; s < squarings; ++s) r = tri_mul(r, r);
  return r;
}

struct Chain {
  // closed chain data for alpha = 0, 2 beta in {0,1,2}, 2 gamma in {1,2}
  int two_beta = 0;
  int two_gamma = 1;
  std::vector<MomentIndex> index;          // topological order: m major, n minor
  std::map<MomentIndex, int> slot;
  std::vector<bool> divergent;
  Tri gen{0};
};

void require_closure(const ModelSpec& spec) {
  if (spec.kind != ModelKind::Algebraic)
    fail(Errc::ChainDoesNotClose, "moment chain is closed only for the algebraic family");
  if (!spec.alpha.is(0))
    fail(Errc::ChainDoesNotClose, "alpha = " + spec.alpha.str() + " does not close the chain");
  const bool beta_ok = spec.beta.is(0) || spec.beta.is(1, 2) || spec.beta.is(1);
  if (!beta_ok)
    fail(Errc::ChainDoesNotClose, "beta = " + spec.beta.str() + " does not close the chain");
  if (!spec.gamma.is(1, 2) && !spec.gamma.is(1))
    fail(Errc::ChainDoesNotClose, "gamma = " + spec.gamma.str() + " does not close the chain");
}

Chain build_chain(const ModelSpec& spec, int max_m, int max_n) {
  require_closure(spec);
  Chain ch;
  ch.two_beta = spec.beta.is(0) ? 0 : (spec.beta.is(1, 2) ? 1 : 2);
  ch.two_gamma = spec.gamma.is(1, 2) ? 1 : 2;

  // level m draws on level m-2 at order n + 2 gamma, so lower levels carry
  // extra headroom in n
  auto n_cap = [&](int m) { return max_n + ch.two_gamma * ((max_m - m + 1) / 2); };
  for (int m = 0; m <= max_m; ++m)
    for (int n = 0; n <= n_cap(m); ++n) {
      ch.slot[{m, n}] = static_cast<int>(ch.index.size());
      ch.index.push_back({m, n});
    }

  const int dim = static_cast<int>(ch.index.size());
  ch.gen = Tri(dim);
  const double a = spec.a, sigma = spec.sigma, g2 = spec.g * spec.g;
  for (int r = 0; r < dim; ++r) {
    const auto [m, n] = ch.index[r];
    double diag = -n * a;
    if (ch.two_beta == 2) diag += 0.5 * g2 * n * (n - 1);
    ch.gen.at(r, r) = diag;
    if (n >= 1) {
      double c = n * a * sigma;
      if (ch.two_beta == 1) c += 0.5 * g2 * n * (n - 1);
      ch.gen.at(r, ch.slot.at({m, n - 1})) += c;
    }
    if (ch.two_beta == 0 && n >= 2) ch.gen.at(r, ch.slot.at({m, n - 2})) += 0.5 * g2 * n * (n - 1);
    if (m >= 2) ch.gen.at(r, ch.slot.at({m - 2, n + ch.two_gamma})) += 0.5 * m * (m - 1);
  }

  // exponential divergence: for beta = 1 the diagonal growth rate
  // n(n-1) g^2/2 - n a turns non-negative at n >= 1 + 2a/g^2, and divergence
  // propagates to everything that feeds on a divergent index
  ch.divergent.assign(dim, false);
  for (int r = 0; r < dim; ++r) {
    const auto [m, n] = ch.index[r];
    if (ch.two_beta == 2 && n >= 1 && (n - 1) * g2 * 0.5 >= a) ch.divergent[r] = true;
    if (!ch.divergent[r]) {
      for (int c = 0; c < r; ++c)
        if (ch.divergent[c] && ch.gen.at(r, c) != 0.0) {
          ch.divergent[r] = true;
          break;
        }
    }
  }
  return ch;
}

}  // namespace

double MomentTable::initial(int m, int n) const {
  const auto it = overrides.find({m, n});
  if (it != overrides.end()) return it->second;
  const double xm = (m == 0) ? 1.0 : std::pow(x0, m);
  const double sn = (n == 0) ? 1.0 : std::pow(s0, n);
  return xm * sn;
}

const MomentSeries& MomentTrajectory::at(int m, int n) const {
  for (const auto& s : series)
    if (s.index == MomentIndex{m, n}) return s;
  fail(Errc::UnsupportedExponents, "moment index not in trajectory");
}

MomentTrajectory evolve_moments(const ModelSpec& spec, int max_m, int max_n,
                                const std::vector<double>& t_grid, const MomentTable& initial) {
  validate(spec);
  if (max_m < 0 || max_n < 0) fail(Errc::InvalidConfig, "max_m, max_n must be >= 0");
  if (t_grid.empty()) fail(Errc::InvalidConfig, "empty time grid");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (t_grid[k] < 0 || (k > 0 && t_grid[k] <= t_grid[k - 1]))
      fail(Errc::InvalidConfig, "time grid must be non-negative and strictly increasing");
  }
  Chain ch = build_chain(spec, max_m, max_n);
  const int dim = static_cast<int>(ch.index.size());

  std::vector<double> state(dim);
  for (int r = 0; r < dim; ++r) state[r] = initial.initial(ch.index[r].m, ch.index[r].n);

  std::vector<bool> overflowed(dim, false);
  std::vector<std::vector<double>> recorded(dim);

  std::map<double, Tri> props;  // propagator cache per distinct grid spacing
  auto propagate = [&](double h) {
    auto it = props.find(h);
    if (it == props.end()) {
      Tri ah = tri_scale_add(ch.gen, h, ch.gen, 0.0, 0.0);
      it = props.emplace(h, tri_expm(ah)).first;
      Tri& p = it->second;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j)
          if (!std::isfinite(p.at(i, j))) {
            if (!ch.divergent[i])
              fail(Errc::ToleranceNotMet, "propagator overflow; refine the time grid");
            p.at(i, j) = 1e300;  // keeps the overflow guard tripping deterministically
          }
    }
    const Tri& p = it->second;
    std::vector<double> next(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
      double s = 0;
      for (int j = 0; j <= i; ++j) s += p.at(i, j) * state[j];
      next[i] = s;
    }
    state = std::move(next);
    for (int r = 0; r < dim; ++r) {
      if (!overflowed[r] && std::abs(state[r]) > kOverflowGuard) {
        overflowed[r] = true;
        ch.divergent[r] = true;
        state[r] = 0.0;  // keep the vector finite; the series reports NaN from here on
      } else if (overflowed[r]) {
        state[r] = 0.0;
      }
    }
  };

  double t_prev = 0.0;
  for (double t : t_grid) {
    if (t > t_prev) propagate(t - t_prev);
    t_prev = t;
    for (int r = 0; r < dim; ++r)
      recorded[r].push_back(overflowed[r] ? std::numeric_limits<double>::quiet_NaN() : state[r]);
  }

  MomentTrajectory out;
  out.t = t_grid;
  for (int r = 0; r < dim; ++r) {
    const auto [m, n] = ch.index[r];
    if (m > max_m || n > max_n) continue;  // headroom indices stay internal
    MomentSeries s;
    s.index = {m, n};
    s.status = ch.divergent[r] ? MomentStatus::Divergent : MomentStatus::Finite;
    s.values = std::move(recorded[r]);
    out.series.push_back(std::move(s));
  }
  return out;
}

MomentValue stationary_s_moment(const ModelSpec& spec, int n) {
  validate(spec);
  if (n < 0) fail(Errc::UnsupportedExponents, "moment order must be >= 0");
  if (n == 0) return {MomentStatus::Finite, 1.0};

  const double a = spec.a, sigma = spec.sigma, g2 = spec.g * spec.g;
  const double s2 = g2 / (2.0 * a);  // stationary variance scale

  if (spec.g == 0.0 && spec.kind == ModelKind::Algebraic) {
    // deterministic drift: stationary law is a point mass at sigma
    if (!spec.alpha.is(0)) fail(Errc::UnsupportedExponents, "stationary moments need alpha = 0");
    return {MomentStatus::Finite, std::pow(sigma, n)};
  }

  if (spec.kind == ModelKind::ExpOU) {
    if (n % 2 == 1) return {MomentStatus::Finite, 0.0};
    const int k = n / 2;
    return {MomentStatus::Finite, std::exp(log_gaussian_moment_factor(k) + k * std::log(s2))};
  }

  if (!spec.alpha.is(0))
    fail(Errc::UnsupportedExponents, "stationary moments need alpha = 0");

  if (spec.beta.is(0)) {
    // Gaussian around sigma with variance s2
    double sum = 0;
    for (int k = 0; 2 * k <= n; ++k) {
      const int rest = n - 2 * k;
      if (sigma == 0.0 && rest > 0) continue;
      double lg = log_binomial(n, 2 * k) + log_gaussian_moment_factor(k) + k * std::log(s2);
      if (rest > 0) lg += rest * std::log(sigma);
      sum += std::exp(lg);
    }
    return {MomentStatus::Finite, sum};
  }
  if (spec.beta.is(1, 2)) {
    const double z = 2.0 * a * sigma / g2;
    if (z == 0.0) return {MomentStatus::Finite, 0.0};  // degenerate: mass collapses onto S = 0
    return {MomentStatus::Finite,
            std::exp(n * std::log(s2) + std::lgamma(z + n) - std::lgamma(z))};
  }
  if (spec.beta.is(1)) {
    if ((n - 1) * g2 * 0.5 >= a) return {MomentStatus::Divergent, 0.0};
    double prod = 1.0;
    for (int j = 1; j <= n - 1; ++j) prod *= 1.0 - j * g2 / (2.0 * a);
    return {MomentStatus::Finite, std::pow(sigma, n) / prod};
  }
  fail(Errc::UnsupportedExponents, "stationary moments need 2 beta in {0,1,2}");
}

MomentValue longtime_limit(const ModelSpec& spec, int l, int n) {
  validate(spec);
  if (l < 0 || n < 0) fail(Errc::UnsupportedExponents, "orders must be >= 0");
  const double front = std::exp(log_gaussian_moment_factor(l));
  const double a = spec.a, sigma = spec.sigma, g2 = spec.g * spec.g;

  if (spec.kind == ModelKind::ExpOU) {
    if (n % 2 == 1) return {MomentStatus::Finite, 0.0};
    const MomentValue sn = stationary_s_moment(spec, n);
    return {MomentStatus::Finite, front * std::exp(l * (2.0 * sigma + g2 / a)) * sn.value};
  }

  if (!spec.alpha.is(0))
    fail(Errc::UnsupportedExponents, "long-time limits need alpha = 0");

  if (spec.beta.is(1)) {
    // power-law family: finite only while l + n < 1 + 2a/g^2
    if (!spec.gamma.is(1, 2))
      fail(Errc::UnsupportedExponents, "beta = 1 long-time limits are known for gamma = 1/2");
    if ((l + n - 1) * g2 * 0.5 >= a) return {MomentStatus::Divergent, 0.0};
    double prod = 1.0;
    for (int j = 1; j <= n - 1; ++j) prod *= 1.0 - j * g2 / (2.0 * a);
    return {MomentStatus::Finite, front * std::pow(sigma, l + n) / prod};
  }

  // diffusion scale D = stationary <S^{2 gamma}>
  const int two_gamma = spec.gamma.is(1, 2) ? 1 : 2;
  const MomentValue d = stationary_s_moment(spec, two_gamma);
  const MomentValue sn = stationary_s_moment(spec, n);
  return {MomentStatus::Finite, front * std::pow(d.value, l) * sn.value};
}

double garch_tail_exponent(const ModelSpec& spec) {
  validate_for_analytics(spec);
  if (spec.kind != ModelKind::Algebraic || !spec.alpha.is(0) || !spec.beta.is(1))
    fail(Errc::NotGarch, "tail exponent applies to alpha = 0, beta = 1");
  return 3.0 + 4.0 * spec.a / (spec.g * spec.g);
}

double acf_proxy_v1(const ModelSpec& spec, int u, double delta_t) {
  validate(spec);
  if (u < 0 || delta_t < 0) fail(Errc::UnsupportedExponents, "need u >= 0, delta_t >= 0");
  const MomentValue mu_u = stationary_s_moment(spec, u);
  const MomentValue mu_u1 = stationary_s_moment(spec, u + 1);
  if (!mu_u.finite() || !mu_u1.finite())
    fail(Errc::DivergentMoment, "stationary moment diverges");
  const double base = spec.sigma * mu_u.value;
  return base + (mu_u1.value - base) * std::exp(-spec.a * delta_t);
}

}  // namespace svlab
