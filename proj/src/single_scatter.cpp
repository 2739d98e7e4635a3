#include "uvscatter/single_scatter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uvscatter/threads.hpp"

namespace uvscatter::single_scatter {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBracketEps = 1e-9;

// Scenario constants flattened for the integrand hot path.
struct Kernel {
  double r;                  // baseline distance
  double b;                  // mu_T . r_vec = r * mu_T.y
  geometry::Vec3 mu_t;
  double cos_half_fov;
  double cos_half_beam;
  double sin_tr, cos_tr;     // Rx axis inclination
  double cos_pr, sin_pr;     // Rx axis azimuth
  emission::Kind kind;
  emission::Pattern pattern;
  double k_s, k_e;
  scattering::PhaseEval phase{scattering::AtmosphereParams{1.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
  double c;
  double tx_exclusion;       // nodes closer to the Tx than this score 0
  double r2_trunc;

  static Kernel make(const Scenario& s, double trunc) {
    Kernel k;
    const auto& g = s.geometry;
    const auto& a = s.atmosphere;
    k.r = g.range_m;
    k.mu_t = g.tx_direction();
    k.b = g.range_m * k.mu_t.y;
    k.cos_half_fov = std::cos(0.5 * g.fov_full_angle_rad);
    k.cos_half_beam = std::cos(0.5 * g.beam_full_angle_rad);
    k.sin_tr = std::sin(g.rx_inclination_rad);
    k.cos_tr = std::cos(g.rx_inclination_rad);
    k.cos_pr = std::cos(g.rx_azimuth_rad);
    k.sin_pr = std::sin(g.rx_azimuth_rad);
    k.kind = s.emission.kind;
    k.pattern = s.emission;
    k.k_s = a.k_s();
    k.k_e = a.k_e();
    k.phase = scattering::PhaseEval(a);
    k.c = s.light_speed;
    k.tx_exclusion = 1e-6 * g.range_m;
    k.r2_trunc = trunc;
    return k;
  }

  // Inclination trigonometry hoisted per theta row.
  struct Row {
    double sin_th, cos_th;
  };

  Row row(double theta) const { return {std::sin(theta), std::cos(theta)}; }

  // Per-ray constants reused across radial evaluations.
  struct Ray {
    double sin_th, u_y, cos_zeta, a;
    bool in_fov;
  };

  Ray ray(const Row& row, double phi) const {
    Ray out;
    const double cp = std::cos(phi), sp = std::sin(phi);
    out.sin_th = row.sin_th;
    out.u_y = row.sin_th * sp;
    out.a = mu_t.x * row.sin_th * cp + mu_t.y * out.u_y + mu_t.z * row.cos_th;
    out.cos_zeta = sin_tr * row.sin_th * (cp * cos_pr + sp * sin_pr) + cos_tr * row.cos_th;
    out.in_fov = out.cos_zeta >= cos_half_fov;
    return out;
  }

  geometry::RadialInterval beam_interval(const Ray& ray) const {
    return geometry::detail::beam_interval_core(ray.a, b, ray.u_y, r, kind, cos_half_beam,
                                                r2_trunc);
  }

  // Eq-4-style density T exp(-k_e r_a) cos(zeta) P(cos theta_s) sin(theta) / r1^2.
  double density(const Ray& ray, double r2) const {
    if (!ray.in_fov) return 0.0;
    const double r1sq = r2 * r2 + r * r - 2.0 * r2 * r * ray.u_y;
    const double r1 = std::sqrt(std::max(0.0, r1sq));
    if (r1 < tx_exclusion) return 0.0;
    const double t_emit = emission::intensity_from_cos(pattern, (ray.a * r2 - b) / r1);
    if (t_emit == 0.0) return 0.0;
    const double mu_s = std::clamp((r * ray.u_y - r2) / r1, -1.0, 1.0);
    return t_emit * std::exp(-k_e * (r1 + r2)) * ray.cos_zeta * phase(mu_s) * ray.sin_th /
           r1sq;
  }

  double radial_distance_for_time(double ct, double u_y) const {
    return (ct * ct - r * r) / (2.0 * (ct - r * u_y));
  }

  double time_of(double r2, double u_y) const {
    const double r1 = std::sqrt(std::max(0.0, r2 * r2 + r * r - 2.0 * r2 * r * u_y));
    return (r1 + r2) / c;
  }

  // CIR integrand of one ray at time t, including the dr2/dt factor.
  double cir_density(const Ray& ray, const geometry::RadialInterval& iv, double t) const {
    if (!ray.in_fov || iv.empty()) return 0.0;
    const double ct = c * t;
    if (ct <= r) return 0.0;
    if (t <= time_of(iv.lo, ray.u_y) || t > time_of(iv.hi, ray.u_y)) return 0.0;
    const double r2 = radial_distance_for_time(ct, ray.u_y);
    const double r1sq = r2 * r2 + r * r - 2.0 * r2 * r * ray.u_y;
    const double r1 = std::sqrt(std::max(0.0, r1sq));
    if (r1 < tx_exclusion) return 0.0;
    const double bracket = 1.0 + (r2 - r * ray.u_y) / r1;
    if (bracket < kBracketEps) return 0.0;  // integrable singularity, measure zero
    const double t_emit = emission::intensity_from_cos(pattern, (ray.a * r2 - b) / r1);
    if (t_emit == 0.0) return 0.0;
    const double mu_s = std::clamp((r * ray.u_y - r2) / r1, -1.0, 1.0);
    return t_emit * std::exp(-k_e * (r1 + r2)) * ray.cos_zeta * phase(mu_s) * ray.sin_th /
           r1sq * (c / bracket);
  }
};

}  // namespace

void Scenario::validate() const {
  geometry.validate();
  atmosphere.validate();
  if (!(detector_area_m2 > 0.0))
    throw std::invalid_argument("Scenario: detector area must be > 0");
  if (!(pulse_energy_j > 0.0)) throw std::invalid_argument("Scenario: pulse energy must be > 0");
  if (!(light_speed > 0.0)) throw std::invalid_argument("Scenario: light speed must be > 0");
}

double trajectory_time(const geometry::ScatterPoint& p, const Scenario& s) {
  return (geometry::r1_norm(p, s.geometry.range_m) + p.r2_m) / s.light_speed;
}

double r2_of_time(double t, double theta, double phi, const Scenario& s) {
  const double ct = s.light_speed * t;
  const double r = s.geometry.range_m;
  if (!(ct > r)) throw std::domain_error("r2_of_time: requires c*t > r");
  const double u_y = std::sin(theta) * std::sin(phi);
  return (ct * ct - r * r) / (2.0 * (ct - r * u_y));
}

double r2_of_time_derivative(double t, double theta, double phi, const Scenario& s) {
  const double r2 = r2_of_time(t, theta, phi, s);
  const double r = s.geometry.range_m;
  const double u_y = std::sin(theta) * std::sin(phi);
  const double r1 = std::sqrt(std::max(0.0, r2 * r2 + r * r - 2.0 * r2 * r * u_y));
  if (!(r1 > 0.0)) throw NearSingularError("r2_of_time_derivative: r1 = 0");
  const double bracket = 1.0 + (r2 - r * u_y) / r1;
  if (bracket < kBracketEps)
    throw NearSingularError("r2_of_time_derivative: derivative diverges (bracket ~ 0)");
  return s.light_speed / bracket;
}

double r2_truncation(const Scenario& s, double cap_m) {
  return std::min(s.geometry.range_m + 20.0 / s.atmosphere.k_e(), cap_m);
}

geometry::IntegrationDomain make_domain(const Scenario& s) {
  return geometry::make_integration_domain(s.geometry, s.emission.kind, r2_truncation(s));
}

double total_energy(const Scenario& s, const quad::Config& cfg) {
  const Kernel k = Kernel::make(s, r2_truncation(s));
  const auto domain = make_domain(s);
  if (domain.empty()) return 0.0;
  const auto& g = s.geometry;

  // The bounds callbacks run once per theta row / per ray, immediately
  // before the integrations they parameterize, so they double as the
  // places to hoist the trigonometry.
  Kernel::Row row{};
  Kernel::Ray ray{};
  const quad::Result res = quad::integrate_3d(
      [&](double, double, double r2) { return k.density(ray, r2); }, domain.theta_min,
      domain.theta_max,
      [&](double th) {
        row = k.row(th);
        return geometry::fov_phi_bounds(g, th);
      },
      [&](double, double ph) {
        ray = k.ray(row, ph);
        return k.beam_interval(ray);
      },
      cfg, domain.theta_hints);
  return s.pulse_energy_j * k.k_s * s.detector_area_m2 * res.value;
}

double energy_cdf(const Scenario& s, double t, const quad::Config& cfg) {
  if (!(t > s.geometry.range_m / s.light_speed)) return 0.0;
  const Kernel k = Kernel::make(s, r2_truncation(s));
  const auto domain = make_domain(s);
  if (domain.empty()) return 0.0;
  const auto& g = s.geometry;
  const double ct = s.light_speed * t;

  Kernel::Row row{};
  Kernel::Ray ray{};
  const quad::Result res = quad::integrate_3d(
      [&](double, double, double r2) { return k.density(ray, r2); }, domain.theta_min,
      domain.theta_max,
      [&](double th) {
        row = k.row(th);
        return geometry::fov_phi_bounds(g, th);
      },
      [&](double, double ph) {
        ray = k.ray(row, ph);
        geometry::RadialInterval iv = k.beam_interval(ray);
        if (iv.empty()) return iv;
        // Moving upper/lower radial bounds: clamp at the radius whose
        // trajectory takes exactly time t.
        const double r2_t = k.radial_distance_for_time(ct, ray.u_y);
        if (t <= k.time_of(iv.hi, ray.u_y)) iv.hi = r2_t;
        if (t <= k.time_of(iv.lo, ray.u_y)) iv.lo = r2_t;
        return iv;
      },
      cfg, domain.theta_hints);
  return s.pulse_energy_j * k.k_s * s.detector_area_m2 * res.value;
}

double cir(const Scenario& s, double t, const quad::Config& cfg) {
  if (!(t > s.geometry.range_m / s.light_speed)) return 0.0;
  const Kernel k = Kernel::make(s, r2_truncation(s));
  const auto domain = make_domain(s);
  if (domain.empty()) return 0.0;
  const auto& g = s.geometry;

  Kernel::Row row{};
  const quad::Result res = quad::integrate_2d(
      [&](double, double ph) {
        const Kernel::Ray ray = k.ray(row, ph);
        return k.cir_density(ray, k.beam_interval(ray), t);
      },
      domain.theta_min, domain.theta_max,
      [&](double th) {
        row = k.row(th);
        return geometry::fov_phi_bounds(g, th);
      },
      cfg, domain.theta_hints);
  return s.pulse_energy_j * k.k_s * res.value;
}

namespace {

CirSeries series_impl(const Scenario& s, const std::vector<double>& times,
                      const quad::Config& cfg, bool parallel) {
  CirSeries out;
  out.t_s = times;
  out.h_w_m2.assign(times.size(), 0.0);
  out.provenance = Provenance::analytic;

  std::exception_ptr failure;
  const int n = static_cast<int>(times.size());
  if (parallel) {
    const int workers = threads::worker_count();
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (int i = 0; i < n; ++i) {
      try {
        out.h_w_m2[i] = cir(s, times[i], cfg);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (int i = 0; i < n; ++i) out.h_w_m2[i] = cir(s, times[i], cfg);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<double> uniform_grid(double t_start, double t_end, int n_bins) {
  if (!(t_end > t_start)) throw std::invalid_argument("cir_series: t_start must precede t_end");
  if (n_bins < 2) throw std::invalid_argument("cir_series: need at least 2 grid points");
  std::vector<double> t(n_bins);
  const double dt = (t_end - t_start) / (n_bins - 1);
  for (int i = 0; i < n_bins; ++i) t[i] = t_start + i * dt;
  return t;
}

}  // namespace

CirSeries cir_series(const Scenario& s, double t_start, double t_end, int n_bins,
                     const quad::Config& cfg) {
  return series_impl(s, uniform_grid(t_start, t_end, n_bins), cfg, true);
}

CirSeries cir_series_serial(const Scenario& s, double t_start, double t_end, int n_bins,
                            const quad::Config& cfg) {
  return series_impl(s, uniform_grid(t_start, t_end, n_bins), cfg, false);
}

CirSeries cir_series_at(const Scenario& s, const std::vector<double>& times,
                        const quad::Config& cfg) {
  return series_impl(s, times, cfg, true);
}

std::pair<double, double> default_time_window(const Scenario& s, const quad::Config& cfg) {
  const double t_los = s.geometry.range_m / s.light_speed;
  quad::Config coarse = cfg;
  coarse.rel_tol = std::max(cfg.rel_tol, 1e-4);

  const double q_total = total_energy(s, coarse);
  if (!(q_total > 0.0)) return {0.9 * t_los, 2.0 * t_los};

  const double target = 0.999 * q_total;
  double hi = 2.0 * t_los;
  for (int i = 0; i < 60 && energy_cdf(s, hi, coarse) < target; ++i) hi *= 2.0;
  double lo = t_los;
  for (int i = 0; i < 50 && (hi - lo) > 1e-3 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (energy_cdf(s, mid, coarse) < target ? lo : hi) = mid;
  }
  return {0.9 * t_los, hi};
}

}  // namespace uvscatter::single_scatter
