#include "svlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "svlab/error.hpp"

namespace svlab {

namespace {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Segment {
  double a, b, value, error;
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k15 = kWgk[7] * fc;
  double g7 = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double fsum = f(c - dx) + f(c + dx);
    k15 += kWgk[i] * fsum;
    if (i % 2 == 1) g7 += kWg[i / 2] * fsum;
  }
  k15 *= h;
  g7 *= h;
  return Segment{a, b, k15, std::abs(k15 - g7)};
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, int max_intervals) {
  std::vector<Segment> segs;
  segs.reserve(64);
  segs.push_back(gk15(f, a, b));
  double total = segs[0].value;
  double err = segs[0].error;
  while (err > rel_tol * std::max(std::abs(total), 1e-300)) {
    if (static_cast<int>(segs.size()) >= max_intervals)
      fail(Errc::QuadratureFailure, "interval budget exhausted");
    // split the segment with the largest error estimate
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i)
      if (segs[i].error > segs[worst].error) worst = i;
    const Segment s = segs[worst];
    if (!(s.b - s.a > 0) || s.b - s.a < 1e-15 * (std::abs(s.a) + std::abs(s.b)))
      fail(Errc::QuadratureFailure, "interval collapsed before tolerance reached");
    const double mid = 0.5 * (s.a + s.b);
    const Segment l = gk15(f, s.a, mid);
    const Segment r = gk15(f, mid, s.b);
    segs[worst] = l;
    segs.push_back(r);
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
  }
  // re-accumulate to shed the incremental rounding
  total = 0;
  for (const Segment& s : segs) total += s.value;
  return total;
}

double minimize_scalar(const std::function<double(double)>& f, double a, double b, double tol) {
  // golden-section; parabolic acceleration is not worth the edge cases here
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 300 && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

LogIntegral integrate_log(const std::function<double(double)>& logf, double hint,
                          const QuadConfig& cfg) {
  const double kDrop = 75.0;  // exp(-75) ~ 2.7e-33 relative to the peak

  auto safe = [&](double u) {
    const double v = logf(u);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };

  // bracket the maximum by walking outward from the hint with growing steps
  double um = hint;
  double fm = safe(um);
  if (!std::isfinite(fm)) {
    // slide until the integrand is alive
    double h = 1.0;
    bool found = false;
    for (int k = 0; k < 120 && !found; ++k) {
      for (double s : {hint + k * h, hint - k * h}) {
        const double v = safe(s);
        if (std::isfinite(v)) {
          um = s;
          fm = v;
          found = true;
          break;
        }
      }
    }
    if (!found) fail(Errc::QuadratureFailure, "log-integrand nowhere finite near hint");
  }

  auto climb = [&](double dir) {
    double best_u = um, best_f = fm;
    double h = 0.0625;
    for (int k = 0; k < 200; ++k) {
      const double u = best_u + dir * h;
      const double v = safe(u);
      if (v > best_f) {
        best_u = u;
        best_f = v;
        h *= 1.9;
      } else {
        return std::pair{best_u, best_f};
      }
    }
    fail(Errc::QuadratureFailure, "log-integrand does not peak (monotone growth)");
  };
  auto [ur_u, ur_f] = climb(+1.0);
  auto [ul_u, ul_f] = climb(-1.0);
  if (ur_f >= ul_f) {
    um = ur_u;
    fm = ur_f;
  } else {
    um = ul_u;
    fm = ul_f;
  }

  // refine the peak
  {
    double lo = um - 0.25, hi = um + 0.25;
    while (safe(lo) >= fm && std::isfinite(safe(lo))) lo -= (um - lo) * 2;
    while (safe(hi) >= fm && std::isfinite(safe(hi))) hi += (hi - um) * 2;
    const double u = minimize_scalar([&](double x) { return -safe(x); }, lo, hi, 1e-12);
    const double v = safe(u);
    if (v > fm) {
      um = u;
      fm = v;
    }
  }

  // walk to the cut points where the integrand has dropped by kDrop
  auto cut = [&](double dir) {
    double h = 0.25;
    double u = um;
    for (int k = 0; k < 400; ++k) {
      const double nu = u + dir * h;
      const double v = safe(nu);
      if (v < fm - kDrop) {
        // bisection onto the crossing; coarse is fine, it only sets the window
        double a = u, b = nu;
        for (int j = 0; j < 40; ++j) {
          const double m = 0.5 * (a + b);
          (safe(m) < fm - kDrop ? b : a) = m;
        }
        return b;
      }
      u = nu;
      h *= 1.6;
    }
    fail(Errc::QuadratureFailure, "log-integrand tail does not decay");
  };
  const double lo = cut(-1.0);
  const double hi = cut(+1.0);

  const double scale = fm;
  const double I = integrate_gk([&](double u) { return std::exp(safe(u) - scale); }, lo, hi,
                                cfg.rel_tol, cfg.max_intervals);
  if (!(I > 0)) fail(Errc::QuadratureFailure, "non-positive integral");

  LogIntegral out;
  out.log_value = scale + std::log(I);
  out.peak_u = um;
  out.peak_value = fm;
  out.cut_lo = lo;
  out.cut_hi = hi;
  return out;
}

}  // namespace svlab
