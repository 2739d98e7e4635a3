#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uvscatter/emission.hpp"

namespace uvscatter::geometry {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

/// Angle between two nonzero vectors, in [0, pi].
inline double angle_between(const Vec3& a, const Vec3& b) {
  double c = dot(a, b) / (norm(a) * norm(b));
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

/// Unit vector from inclination theta (from +z) and azimuth phi (from +x).
inline Vec3 direction_from_angles(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

/// Orthonormal basis (e1, e2) perpendicular to a unit vector d.
inline std::pair<Vec3, Vec3> orthonormal_basis(const Vec3& d) {
  const double sign = std::copysign(1.0, d.z);
  const double a = -1.0 / (sign + d.z);
  const double b = d.x * d.y * a;
  return {Vec3{1.0 + sign * d.x * d.x * a, sign * b, -sign * d.x},
          Vec3{b, sign + d.y * d.y * a, -d.y}};
}

/// Unit vector at angle acos(cos_theta) from axis, azimuth psi about it.
inline Vec3 rotate_about(const Vec3& axis, double cos_theta, double psi) {
  const auto [e1, e2] = orthonormal_basis(axis);
  const double st = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double cp = std::cos(psi), sp = std::sin(psi);
  return {st * (cp * e1.x + sp * e2.x) + cos_theta * axis.x,
          st * (cp * e1.y + sp * e2.y) + cos_theta * axis.y,
          st * (cp * e1.z + sp * e2.z) + cos_theta * axis.z};
}

class DegenerateGeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Transceiver geometry of one link. The receiver sits at the origin,
/// the transmitter at (0, range_m, 0); +z is the theta = 0 axis.
struct LinkGeometry {
  double range_m = 0.0;            // baseline Tx->Rx distance, > 0
  double tx_inclination_rad = 0.0; // theta_T
  double tx_azimuth_rad = 0.0;     // phi_T
  double rx_inclination_rad = 0.0; // theta_R
  double rx_azimuth_rad = 0.0;     // phi_R
  double beam_full_angle_rad = 0.0; // beta_T
  double fov_full_angle_rad = 0.0;  // beta_R

  Vec3 tx_position() const { return {0.0, range_m, 0.0}; }
  Vec3 tx_direction() const { return direction_from_angles(tx_inclination_rad, tx_azimuth_rad); }
  Vec3 rx_direction() const { return direction_from_angles(rx_inclination_rad, rx_azimuth_rad); }

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Scatter point in spherical coordinates at the receiver origin.
struct ScatterPoint {
  double theta_rad = 0.0;  // inclination, [0, pi]
  double phi_rad = 0.0;    // azimuth
  double r2_m = 0.0;       // radial distance, >= 0

  Vec3 position() const { return r2_m * direction_from_angles(theta_rad, phi_rad); }
  void validate() const;
};

/// Spherical coordinates of a Cartesian position (helper for tests/MC).
ScatterPoint spherical_from_position(const Vec3& p);

/// || r2 u - (0,r,0) ||: distance from the Tx to the scatter point.
double r1_norm(const ScatterPoint& p, double range_m);

/// Angle between the Tx beam axis and the Tx->scatter vector r1.
/// Throws DegenerateGeometryError when the scatter point sits on the Tx.
double angle_gamma_t(const ScatterPoint& p, const LinkGeometry& g);

/// Angle between the Rx FOV axis and the Rx->scatter vector r2.
/// Throws DegenerateGeometryError when r2 = 0.
double angle_zeta(const ScatterPoint& p, const LinkGeometry& g);

/// Scattering angle between r1 and -r2.
double angle_theta_s(const ScatterPoint& p, const LinkGeometry& g);

/// Closed interval of radial distances along one ray; empty when hi <= lo.
struct RadialInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(hi > lo); }
};

/// Inclination range [theta_min, theta_max] covered by the Rx FOV cone.
std::pair<double, double> fov_theta_range(const LinkGeometry& g);

/// Tight azimuth interval [phi_lo, phi_hi] of the FOV cone at a given
/// inclination; spans a full 2*pi turn when the cone wraps the pole.
std::pair<double, double> fov_phi_bounds(const LinkGeometry& g, double theta);

/// Radial interval along the ray (theta, phi) that lies inside the Tx
/// emission support (cone for uniform_cone, forward hemisphere for
/// lambertian), intersected with [0, r2_trunc_m]. May be empty.
RadialInterval beam_r2_bounds(double theta, double phi, const LinkGeometry& g,
                              emission::Kind kind, double r2_trunc_m);

namespace detail {

/// Scalar core of beam_r2_bounds, free of trigonometry: a = mu_T . u,
/// b = mu_T . r_vec, u_y the y component of the ray direction,
/// cos_half = cos(beta_T/2) for the uniform cone.
inline RadialInterval beam_interval_core(double a, double b, double u_y, double r,
                                         emission::Kind kind, double cos_half,
                                         double r2_trunc_m) {
  if (!(r2_trunc_m > 0.0)) return {};

  if (kind == emission::Kind::lambertian) {
    // Forward hemisphere: a*r2 - b > 0.
    if (a > 0.0) {
      const double lo = std::max(0.0, b / a);
      return lo < r2_trunc_m ? RadialInterval{lo, r2_trunc_m} : RadialInterval{};
    }
    if (a < 0.0) {
      if (b >= 0.0) return {};
      return {0.0, std::min(b / a, r2_trunc_m)};
    }
    return b < 0.0 ? RadialInterval{0.0, r2_trunc_m} : RadialInterval{};
  }

  // Uniform cone: gamma_t <= beta_t/2, i.e. a*r2 - b >= k * r1(r2) with
  // k = cos(beta_t/2) in [0,1). Squaring gives a quadratic in r2; the
  // cone is convex, so the feasible set along the ray is one interval.
  const double k = cos_half;
  const double qa = a * a - k * k;
  const double qb = -2.0 * a * b + 2.0 * k * k * r * u_y;
  const double qc = b * b - k * k * r * r;

  const auto inside = [&](double r2) {
    const double p = a * r2 - b;
    const double r1 = std::sqrt(std::max(0.0, r2 * r2 + r * r - 2.0 * r2 * r * u_y));
    return p >= k * r1;
  };
  const auto cone_residual = [&](double r2) {
    const double r1 = std::sqrt(std::max(0.0, r2 * r2 + r * r - 2.0 * r2 * r * u_y));
    return (a * r2 - b) - k * r1;
  };
  const auto cone_residual_deriv = [&](double r2) {
    const double r1 = std::sqrt(std::max(0.0, r2 * r2 + r * r - 2.0 * r2 * r * u_y));
    if (r1 <= 0.0) return a;
    return a - k * (r2 - r * u_y) / r1;
  };

  double cuts[5] = {0.0, r2_trunc_m};
  int n_cuts = 2;
  auto add_root = [&](double root) {
    // Newton polish against the unsquared cone equation; the squared
    // quadratic loses accuracy when a^2 is close to k^2.
    for (int i = 0; i < 3; ++i) {
      const double d = cone_residual_deriv(root);
      if (d == 0.0) break;
      root -= cone_residual(root) / d;
    }
    if (root > 0.0 && root < r2_trunc_m) cuts[n_cuts++] = root;
  };
  if (std::abs(qa) > 1e-30) {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (qb + std::copysign(sq, qb));
      add_root(q / qa);
      if (q != 0.0) add_root(qc / q);
    }
  } else if (std::abs(qb) > 1e-30) {
    add_root(-qc / qb);
  }
  std::sort(cuts, cuts + n_cuts);

  RadialInterval out{};
  bool found = false;
  for (int i = 0; i + 1 < n_cuts; ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    if (inside(0.5 * (cuts[i] + cuts[i + 1]))) {
      if (!found) {
        out = {cuts[i], cuts[i + 1]};
        found = true;
      } else {
        out.hi = cuts[i + 1];  // merge adjacent feasible segments
      }
    }
  }
  return found ? out : RadialInterval{};
}

}  // namespace detail

/// Integration region of the single-scatter triple integral.
struct IntegrationDomain {
  double theta_min = 0.0;
  double theta_max = 0.0;
  std::function<std::pair<double, double>(double theta)> phi_bounds;
  std::function<RadialInterval(double theta, double phi)> r2_bounds;
  std::vector<double> theta_hints;  // interior kinks worth pre-splitting at

  bool empty() const { return !(theta_max > theta_min); }
};

IntegrationDomain make_integration_domain(const LinkGeometry& g, emission::Kind kind,
                                          double r2_trunc_m);

}  // namespace uvscatter::geometry
