#include "uvscatter/emission.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uvscatter::emission {

namespace {
constexpr double kPi = std::numbers::pi;
}

double lambertian_order(double beam_full_angle_rad) {
  if (!(beam_full_angle_rad > 0.0) || !(beam_full_angle_rad < kPi)) {
    throw std::domain_error("lambertian_order: beam full angle must lie in (0, pi)");
  }
  return -std::numbers::ln2 / std::log(std::cos(0.5 * beam_full_angle_rad));
}

Pattern Pattern::uniform_cone(double beam_full_angle_rad) {
  if (!(beam_full_angle_rad > 0.0) || !(beam_full_angle_rad <= kPi)) {
    throw std::domain_error("uniform_cone: beam full angle must lie in (0, pi]");
  }
  Pattern p;
  p.kind = Kind::uniform_cone;
  p.beam_full_angle_rad = beam_full_angle_rad;
  p.cos_half_angle = std::cos(0.5 * beam_full_angle_rad);
  p.peak = 1.0 / (2.0 * kPi * (1.0 - p.cos_half_angle));
  return p;
}

Pattern Pattern::lambertian(double beam_full_angle_rad) {
  Pattern p;
  p.kind = Kind::lambertian;
  p.beam_full_angle_rad = beam_full_angle_rad;
  p.order = lambertian_order(beam_full_angle_rad);
  p.cos_half_angle = std::cos(0.5 * beam_full_angle_rad);
  p.peak = (p.order + 1.0) / (2.0 * kPi);
  return p;
}

double intensity(const Pattern& pattern, double gamma_t_rad) {
  if (pattern.kind == Kind::uniform_cone) {
    // The support boundary gamma_t == beta_t/2 is inside the cone.
    return gamma_t_rad <= 0.5 * pattern.beam_full_angle_rad ? pattern.peak : 0.0;
  }
  if (gamma_t_rad > 0.5 * kPi) return 0.0;
  return pattern.peak * std::pow(std::cos(gamma_t_rad), pattern.order);
}

double sample_cos_gamma(const Pattern& pattern, double u) {
  if (pattern.kind == Kind::uniform_cone) {
    // cos(gamma) uniform over [cos(beta/2), 1].
    return 1.0 - u * (1.0 - pattern.cos_half_angle);
  }
  // pdf(c) = (m+1) c^m on [0,1].
  return std::pow(u, 1.0 / (pattern.order + 1.0));
}

}  // namespace uvscatter::emission
