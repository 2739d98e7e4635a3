#include "uvscatter/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uvscatter::scattering {

namespace {
constexpr double kPi = std::numbers::pi;
}

void AtmosphereParams::validate() const {
  if (!(k_s_rayleigh >= 0.0) || !(k_s_mie >= 0.0) || !(k_a >= 0.0))
    throw std::invalid_argument("AtmosphereParams: coefficients must be >= 0");
  if (!(k_s() > 0.0))
    throw std::invalid_argument("AtmosphereParams: total scattering coefficient must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("AtmosphereParams: gamma must be >= 0");
  if (!(asymmetry > -1.0) || !(asymmetry < 1.0))
    throw std::invalid_argument("AtmosphereParams: g must lie in (-1, 1)");
  if (!(forward_fraction >= 0.0) || !(forward_fraction <= 1.0))
    throw std::invalid_argument("AtmosphereParams: f must lie in [0, 1]");
  // The generalized HG term can dip below zero for extreme (g, f)
  // combinations; reject those so P stays a density.
  for (int i = 0; i <= 512; ++i) {
    const double mu = -1.0 + 2.0 * i / 512.0;
    if (phase_function(mu, *this) < 0.0)
      throw std::invalid_argument("AtmosphereParams: phase function is negative for these g, f");
  }
}

double rayleigh_phase(double mu, double gamma) {
  return 3.0 * (1.0 + 3.0 * gamma + (1.0 - gamma) * mu * mu) / (16.0 * kPi * (1.0 + 2.0 * gamma));
}

double mie_phase(double mu, double g, double f) {
  const double g2 = g * g;
  const double denom = 1.0 + g2 - 2.0 * g * mu;
  return (1.0 - g2) / (4.0 * kPi) *
         (1.0 / (denom * std::sqrt(denom)) +
          f * (3.0 * mu * mu - 1.0) / (2.0 * std::pow(1.0 + g2, 1.5)));
}

double phase_function(double mu, const AtmosphereParams& a) {
  if (!(mu >= -1.0) || !(mu <= 1.0))
    throw std::domain_error("phase_function: cos(theta_s) must lie in [-1, 1]");
  const double ks = a.k_s();
  return (a.k_s_rayleigh * rayleigh_phase(mu, a.gamma) +
          a.k_s_mie * mie_phase(mu, a.asymmetry, a.forward_fraction)) /
         ks;
}

PhaseSampler::PhaseSampler(const AtmosphereParams& a, int knots) {
  if (knots < 2) throw std::invalid_argument("PhaseSampler: need at least 2 knots");
  pdf_.resize(knots + 1);
  cdf_.resize(knots + 1);
  dmu_ = 2.0 / knots;
  for (int j = 0; j <= knots; ++j) {
    const double mu = std::min(1.0, -1.0 + j * dmu_);
    pdf_[j] = std::max(0.0, 2.0 * kPi * phase_function(mu, a));
  }
  cdf_[0] = 0.0;
  for (int j = 1; j <= knots; ++j) {
    cdf_[j] = cdf_[j - 1] + 0.5 * (pdf_[j - 1] + pdf_[j]) * dmu_;
  }
  const double total = cdf_.back();
  for (auto& c : cdf_) c /= total;
  for (auto& p : pdf_) p /= total;
}

double PhaseSampler::sample_cos_theta(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t j = std::min<std::size_t>(
      cdf_.size() - 2, it == cdf_.begin() ? 0 : static_cast<std::size_t>(it - cdf_.begin()) - 1);
  // Density is linear on the segment, so the CDF piece is quadratic:
  // u - c_j = p_j d + s d^2 / 2 with s the density slope.
  const double rem = u - cdf_[j];
  const double p = pdf_[j];
  const double s = (pdf_[j + 1] - pdf_[j]) / dmu_;
  double d;
  if (std::abs(s) * dmu_ < 1e-12 * std::max(p, 1e-300)) {
    d = p > 0.0 ? rem / p : 0.0;
  } else {
    const double disc = std::max(0.0, p * p + 2.0 * s * rem);
    d = (std::sqrt(disc) - p) / s;
  }
  d = std::clamp(d, 0.0, dmu_);
  return std::min(1.0, -1.0 + j * dmu_ + d);
}

geometry::Vec3 PhaseSampler::sample_direction(rng::Philox& rng, const geometry::Vec3& incoming) const {
  const double mu = sample_cos_theta(rng.next_double());
  const double psi = 2.0 * kPi * rng.next_double();
  return geometry::rotate_about(incoming, mu, psi);
}

}  // namespace uvscatter::scattering
