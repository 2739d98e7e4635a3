#include "uvscatter/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uvscatter::geometry {

namespace {
constexpr double kPi = std::numbers::pi;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }
}  // namespace

void LinkGeometry::validate() const {
  if (!(range_m > 0.0)) throw std::invalid_argument("LinkGeometry: range must be > 0");
  if (!(beam_full_angle_rad > 0.0) || !(beam_full_angle_rad <= kPi))
    throw std::invalid_argument("LinkGeometry: beam full angle must lie in (0, pi]");
  if (!(fov_full_angle_rad > 0.0) || !(fov_full_angle_rad <= kPi))
    throw std::invalid_argument("LinkGeometry: FOV full angle must lie in (0, pi]");
  if (!(tx_inclination_rad >= 0.0) || !(tx_inclination_rad <= kPi) ||
      !(rx_inclination_rad >= 0.0) || !(rx_inclination_rad <= kPi))
    throw std::invalid_argument("LinkGeometry: inclinations must lie in [0, pi]");
  if (std::abs(tx_azimuth_rad) > kPi || std::abs(rx_azimuth_rad) > kPi)
    throw std::invalid_argument("LinkGeometry: azimuths must lie in [-pi, pi]");
}

void ScatterPoint::validate() const {
  if (!(theta_rad >= 0.0) || !(theta_rad <= kPi))
    throw std::invalid_argument("ScatterPoint: theta must lie in [0, pi]");
  if (!(r2_m >= 0.0)) throw std::invalid_argument("ScatterPoint: r2 must be >= 0");
}

ScatterPoint spherical_from_position(const Vec3& p) {
  const double r = norm(p);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  return {std::acos(clamp_unit(p.z / r)), std::atan2(p.y, p.x), r};
}

double r1_norm(const ScatterPoint& p, double range_m) {
  const double cross = 2.0 * p.r2_m * range_m * std::sin(p.theta_rad) * std::sin(p.phi_rad);
  return std::sqrt(std::max(0.0, p.r2_m * p.r2_m + range_m * range_m - cross));
}

double angle_gamma_t(const ScatterPoint& p, const LinkGeometry& g) {
  const double r1 = r1_norm(p, g.range_m);
  if (!(r1 > 0.0)) throw DegenerateGeometryError("angle_gamma_t: scatter point coincides with Tx");
  const double st_t = std::sin(g.tx_inclination_rad);
  const double ct_t = std::cos(g.tx_inclination_rad);
  const double num = st_t * (p.r2_m * std::sin(p.theta_rad) * std::cos(p.phi_rad - g.tx_azimuth_rad) -
                             g.range_m * std::sin(g.tx_azimuth_rad)) +
                     p.r2_m * std::cos(p.theta_rad) * ct_t;
  return std::acos(clamp_unit(num / r1));
}

double angle_zeta(const ScatterPoint& p, const LinkGeometry& g) {
  if (!(p.r2_m > 0.0)) throw DegenerateGeometryError("angle_zeta: r2 must be > 0");
  const double c = std::sin(g.rx_inclination_rad) * std::sin(p.theta_rad) *
                       std::cos(p.phi_rad - g.rx_azimuth_rad) +
                   std::cos(g.rx_inclination_rad) * std::cos(p.theta_rad);
  return std::acos(clamp_unit(c));
}

double angle_theta_s(const ScatterPoint& p, const LinkGeometry& g) {
  if (!(p.r2_m > 0.0)) throw DegenerateGeometryError("angle_theta_s: r2 must be > 0");
  const double r1 = r1_norm(p, g.range_m);
  if (!(r1 > 0.0)) throw DegenerateGeometryError("angle_theta_s: scatter point coincides with Tx");
  const double c = (g.range_m * std::sin(p.theta_rad) * std::sin(p.phi_rad) - p.r2_m) / r1;
  return std::acos(clamp_unit(c));
}

std::pair<double, double> fov_theta_range(const LinkGeometry& g) {
  const double half = 0.5 * g.fov_full_angle_rad;
  return {std::max(0.0, g.rx_inclination_rad - half),
          std::min(kPi, g.rx_inclination_rad + half)};
}

std::pair<double, double> fov_phi_bounds(const LinkGeometry& g, double theta) {
  const double half = 0.5 * g.fov_full_angle_rad;
  const double cos_half = std::cos(half);
  const double s = std::sin(g.rx_inclination_rad) * std::sin(theta);
  const double num = cos_half - std::cos(g.rx_inclination_rad) * std::cos(theta);
  double width;  // azimuthal half-width of the cone at this inclination
  if (s <= 1e-300) {
    width = num <= 0.0 ? kPi : 0.0;
  } else {
    const double q = num / s;
    if (q <= -1.0) width = kPi;
    else if (q >= 1.0) width = 0.0;
    else width = std::acos(q);
  }
  return {g.rx_azimuth_rad - width, g.rx_azimuth_rad + width};
}

RadialInterval beam_r2_bounds(double theta, double phi, const LinkGeometry& g,
                              emission::Kind kind, double r2_trunc_m) {
  const Vec3 u = direction_from_angles(theta, phi);
  const Vec3 mu_t = g.tx_direction();
  return detail::beam_interval_core(dot(mu_t, u), g.range_m * mu_t.y, u.y, g.range_m, kind,
                                    std::cos(0.5 * g.beam_full_angle_rad), r2_trunc_m);
}

IntegrationDomain make_integration_domain(const LinkGeometry& g, emission::Kind kind,
                                          double r2_trunc_m) {
  IntegrationDomain d;
  std::tie(d.theta_min, d.theta_max) = fov_theta_range(g);
  d.phi_bounds = [g](double theta) { return fov_phi_bounds(g, theta); };
  d.r2_bounds = [g, kind, r2_trunc_m](double theta, double phi) {
    return beam_r2_bounds(theta, phi, g, kind, r2_trunc_m);
  };
  // The azimuthal width has kinks where the cone starts wrapping a pole.
  const double half = 0.5 * g.fov_full_angle_rad;
  const double north = half - g.rx_inclination_rad;
  const double south = 2.0 * kPi - half - g.rx_inclination_rad;
  for (double t : {north, south, g.rx_inclination_rad}) {
    if (t > d.theta_min && t < d.theta_max) d.theta_hints.push_back(t);
  }
  std::sort(d.theta_hints.begin(), d.theta_hints.end());
  return d;
}

}  // namespace uvscatter::geometry
