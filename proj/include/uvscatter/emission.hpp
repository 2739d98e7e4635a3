#pragma once

#include <cmath>

namespace uvscatter::emission {

/// Source radiation pattern family: uniform over a cone, or Lambertian
/// over the forward hemisphere.
enum class Kind { uniform_cone, lambertian };

/// Lambertian emission order m for a half-maximum full angle
/// beta_t in (0, pi). Throws std::domain_error outside that range.
double lambertian_order(double beam_full_angle_rad);

/// Emission pattern T(gamma_t) of the light source, normalized so that
/// the integral over the unit sphere equals 1.
///
/// beam_full_angle_rad is the beam divergence angle for the uniform
/// cone and the full angle at half maximum for the Lambertian pattern.
struct Pattern {
  Kind kind = Kind::uniform_cone;
  double beam_full_angle_rad = 0.0;
  double order = 0.0;           // Lambertian order m; unused for uniform_cone
  double cos_half_angle = 0.0;  // cos(beam_full_angle/2)
  double peak = 0.0;            // on-axis intensity, sr^-1

  static Pattern uniform_cone(double beam_full_angle_rad);
  static Pattern lambertian(double beam_full_angle_rad);
};

/// T(gamma_t) in sr^-1 for gamma_t in [0, pi].
double intensity(const Pattern& pattern, double gamma_t_rad);

/// Same as intensity() but on cos(gamma_t); avoids the acos in hot loops.
inline double intensity_from_cos(const Pattern& pattern, double cos_gamma_t) {
  if (pattern.kind == Kind::uniform_cone) {
    return cos_gamma_t >= pattern.cos_half_angle ? pattern.peak : 0.0;
  }
  if (cos_gamma_t < 0.0) return 0.0;
  return pattern.peak * std::pow(cos_gamma_t, pattern.order);
}

/// Inverse-CDF sample of cos(gamma_t) for a uniform deviate u in [0,1).
double sample_cos_gamma(const Pattern& pattern, double u);

}  // namespace uvscatter::emission
