#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uvscatter/geometry.hpp"

namespace uvscatter::quad {

struct Config {
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  int max_subdivisions = 1'000'000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  long long evaluations = 0;
};

/// Raised when the subdivision budget runs out before the embedded error
/// estimate meets the tolerance; carries the best available result.
class ToleranceNotReached : public std::runtime_error {
 public:
  explicit ToleranceNotReached(Result best)
      : std::runtime_error("quadrature tolerance not reached within subdivision budget"),
        best(best) {}
  Result best;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights (positive half, QUADPACK values).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline std::pair<double, double> gk15(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(mid);
  double k15 = kWgk[7] * f0;
  double g7 = kWg[3] * f0;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double fs = f(mid - dx) + f(mid + dx);
    k15 += kWgk[i] * fs;
    if (i % 2 == 1) g7 += kWg[i / 2] * fs;
  }
  k15 *= h;
  g7 *= h;
  return {k15, std::abs(k15 - g7)};
}

struct Interval {
  double a, b, value, error;
  long long seq;  // insertion order; makes heap pops deterministic on ties
  bool operator<(const Interval& o) const {
    if (error != o.error) return error < o.error;
    return seq > o.seq;
  }
};

}  // namespace detail

/// Adaptive 1-D integration with the embedded 7/15 pair and
/// largest-error-first subdivision. `breakpoints` seeds initial splits at
/// known integrand kinks or jumps. Throws ToleranceNotReached when the
/// subdivision budget is exhausted; an empty interval integrates to 0.
template <class F>
Result integrate_1d(F&& f, double a, double b, const Config& cfg,
                    std::span<const double> breakpoints = {}) {
  Result out;
  if (!(b > a)) return out;

  std::vector<double> edges{a};
  for (double x : breakpoints) {
    if (x > a && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());

  std::priority_queue<detail::Interval> heap;
  long long seq = 0;
  double total_value = 0.0, total_error = 0.0;
  double frozen_value = 0.0, frozen_error = 0.0;

  const auto too_narrow = [](double lo, double hi) {
    return hi - lo < 1e-14 * std::max({std::abs(lo), std::abs(hi), 1e-300});
  };

  // A panel whose 15 nodes all read exactly zero may still straddle a
  // narrow support (indicator integrands); re-probe it once with an
  // 8-way split before accepting it as dead.
  const auto push = [&](double lo, double hi, bool probe) {
    struct Cand {
      double lo, hi;
      bool probe;
    };
    std::vector<Cand> pending{{lo, hi, probe}};
    while (!pending.empty()) {
      const Cand c = pending.back();
      pending.pop_back();
      const auto [v, e] = detail::gk15(f, c.lo, c.hi);
      out.evaluations += 15;
      if (v == 0.0 && e == 0.0) {
        if (c.probe && !too_narrow(c.lo, c.hi)) {
          const double w = (c.hi - c.lo) / 8.0;
          for (int k = 7; k >= 0; --k) {
            pending.push_back({c.lo + k * w, c.lo + (k + 1) * w, false});
          }
        }
        continue;
      }
      total_value += v;
      total_error += e;
      if (too_narrow(c.lo, c.hi)) {
        frozen_value += v;
        frozen_error += e;
      } else {
        heap.push({c.lo, c.hi, v, e, seq++});
      }
    }
  };

  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] > edges[i]) push(edges[i], edges[i + 1], true);
  }

  int subdivisions = 0;
  for (;;) {
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total_value));
    if (total_error <= tol || heap.empty()) break;
    if (total_error - frozen_error <= 0.0) break;  // only unsplittable slivers remain
    if (subdivisions >= cfg.max_subdivisions) {
      throw ToleranceNotReached({total_value, total_error, out.evaluations});
    }
    const detail::Interval worst = heap.top();
    heap.pop();
    total_value -= worst.value;
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    push(worst.a, mid, true);
    push(mid, worst.b, true);
    ++subdivisions;
  }

  out.value = total_value;
  out.error = total_error;
  return out;
}

/// Iterated adaptive 2-D integration over theta in [theta_min, theta_max]
/// with per-theta phi bounds. The inner pass runs at a tenth of the outer
/// tolerance.
template <class F, class PhiBounds>
Result integrate_2d(F&& f, double theta_min, double theta_max, PhiBounds&& phi_bounds,
                    const Config& cfg, std::span<const double> theta_hints = {}) {
  if (!(theta_max > theta_min)) return {};
  Config inner = cfg;
  inner.rel_tol = std::max(0.1 * cfg.rel_tol, 1e-14);
  inner.abs_tol = cfg.abs_tol > 0.0 ? 0.1 * cfg.abs_tol / (theta_max - theta_min) : 0.0;

  long long inner_evals = 0;
  const auto outer = [&](double theta) {
    const auto [plo, phi] = phi_bounds(theta);
    if (!(phi > plo)) return 0.0;
    const Result r = integrate_1d([&](double p) { return f(theta, p); }, plo, phi, inner);
    inner_evals += r.evaluations;
    return r.value;
  };
  Result r = integrate_1d(outer, theta_min, theta_max, cfg, theta_hints);
  r.evaluations += inner_evals;
  return r;
}

/// Iterated adaptive 3-D integration; the innermost radial interval is
/// supplied per ray by `r2_bounds`.
template <class F, class PhiBounds, class R2Bounds>
Result integrate_3d(F&& f, double theta_min, double theta_max, PhiBounds&& phi_bounds,
                    R2Bounds&& r2_bounds, const Config& cfg,
                    std::span<const double> theta_hints = {}) {
  if (!(theta_max > theta_min)) return {};
  Config innermost = cfg;
  innermost.rel_tol = std::max(0.01 * cfg.rel_tol, 1e-14);
  innermost.abs_tol = 0.0;

  long long radial_evals = 0;
  const auto over_ray = [&](double theta, double phi) {
    const geometry::RadialInterval iv = r2_bounds(theta, phi);
    if (iv.empty()) return 0.0;
    const Result r = integrate_1d([&](double r2) { return f(theta, phi, r2); }, iv.lo, iv.hi,
                                  innermost);
    radial_evals += r.evaluations;
    return r.value;
  };
  Result r = integrate_2d(over_ray, theta_min, theta_max, phi_bounds, cfg, theta_hints);
  r.evaluations += radial_evals;
  return r;
}

/// Convenience overload on an assembled integration domain.
template <class F>
Result integrate_3d(F&& f, const geometry::IntegrationDomain& domain, const Config& cfg) {
  if (domain.empty()) return {};
  return integrate_3d(std::forward<F>(f), domain.theta_min, domain.theta_max,
                      domain.phi_bounds, domain.r2_bounds, cfg, domain.theta_hints);
}

}  // namespace uvscatter::quad
