#pragma once

#include <cmath>
#include <vector>

#include "uvscatter/geometry.hpp"
#include "uvscatter/rng.hpp"

namespace uvscatter::scattering {

/// Atmospheric scattering/absorption coefficients (SI, m^-1) and the
/// shape parameters of the phase function mixture.
struct AtmosphereParams {
  double k_s_rayleigh = 0.0;  // Rayleigh scattering coefficient
  double k_s_mie = 0.0;       // Mie scattering coefficient
  double k_a = 0.0;           // absorption coefficient
  double gamma = 0.0;         // Rayleigh shape parameter, >= 0
  double asymmetry = 0.0;     // Henyey-Greenstein g, in (-1, 1)
  double forward_fraction = 0.0;  // Mie forward-lobe weight f, in [0, 1]

  double k_s() const { return k_s_rayleigh + k_s_mie; }
  double k_e() const { return k_s() + k_a; }

  /// Throws std::invalid_argument when any coefficient is out of range
  /// or the resulting phase function is negative somewhere.
  void validate() const;
};

/// Generalized Rayleigh phase function, sr^-1.
double rayleigh_phase(double mu, double gamma);

/// Generalized Henyey-Greenstein (Mie) phase function, sr^-1.
double mie_phase(double mu, double g, double f);

/// Mixture phase function P(cos theta_s) weighted by the Rayleigh and
/// Mie scattering coefficients. Throws std::domain_error for |mu| > 1.
double phase_function(double mu, const AtmosphereParams& a);

/// Same mixture with the constants flattened for hot loops.
struct PhaseEval {
  double c0 = 0.0, c2 = 0.0;     // weighted Rayleigh: c0 + c2 mu^2
  double hg = 0.0, hg_f = 0.0;   // weighted HG amplitude and forward-lobe term
  double g = 0.0;

  explicit PhaseEval(const AtmosphereParams& a) {
    const double ks = a.k_s();
    const double w_ray = a.k_s_rayleigh / ks;
    const double w_mie = a.k_s_mie / ks;
    const double norm = 16.0 * 3.14159265358979323846 * (1.0 + 2.0 * a.gamma);
    c0 = w_ray * 3.0 * (1.0 + 3.0 * a.gamma) / norm;
    c2 = w_ray * 3.0 * (1.0 - a.gamma) / norm;
    g = a.asymmetry;
    const double g2 = g * g;
    hg = w_mie * (1.0 - g2) / (4.0 * 3.14159265358979323846);
    hg_f = a.forward_fraction / (2.0 * std::pow(1.0 + g2, 1.5));
  }

  double operator()(double mu) const {
    const double denom = 1.0 + g * g - 2.0 * g * mu;
    return c0 + c2 * mu * mu +
           hg * (1.0 / (denom * std::sqrt(denom)) + hg_f * (3.0 * mu * mu - 1.0));
  }
};

/// Inverse-CDF sampler for the scattering angle. The CDF of cos(theta_s)
/// is tabulated once per parameter set on a uniform knot grid and
/// inverted by a monotone piecewise-quadratic interpolant, so drawing a
/// sample is O(log knots). Immutable after construction, shareable.
class PhaseSampler {
 public:
  explicit PhaseSampler(const AtmosphereParams& a, int knots = 4096);

  /// cos(theta_s) for a uniform deviate u in [0, 1).
  double sample_cos_theta(double u) const;

  /// New propagation direction after a scattering event: polar angle
  /// from the phase function, azimuth uniform about `incoming`.
  geometry::Vec3 sample_direction(rng::Philox& rng, const geometry::Vec3& incoming) const;

 private:
  std::vector<double> cdf_;  // cdf_[j] = P(cos theta_s <= mu_j)
  std::vector<double> pdf_;  // density at the knots
  double dmu_ = 0.0;
};

}  // namespace uvscatter::scattering
