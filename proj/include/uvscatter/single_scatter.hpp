#pragma once

#include <utility>
#include <vector>

#include "uvscatter/emission.hpp"
#include "uvscatter/geometry.hpp"
#include "uvscatter/quadrature.hpp"
#include "uvscatter/scattering.hpp"

namespace uvscatter::single_scatter {

/// Full description of one link: transceiver geometry, source emission
/// pattern, atmosphere, detector and pulse.
struct Scenario {
  geometry::LinkGeometry geometry;
  emission::Pattern emission;
  scattering::AtmosphereParams atmosphere;
  double detector_area_m2 = 0.0;
  double pulse_energy_j = 0.0;
  double light_speed = 2.99792458e8;

  void validate() const;
};

enum class Provenance { analytic, monte_carlo };

/// Channel impulse response sampled on a time grid; h in W/m^2.
struct CirSeries {
  std::vector<double> t_s;
  std::vector<double> h_w_m2;
  Provenance provenance = Provenance::analytic;
  int mc_order = 0;  // highest scattering order folded in (MC only)
};

class NearSingularError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Time of flight of the single-scatter trajectory Tx -> p -> Rx.
double trajectory_time(const geometry::ScatterPoint& p, const Scenario& s);

/// Radial distance along the ray (theta, phi) whose trajectory takes
/// exactly time t. Requires c*t > r; throws std::domain_error otherwise.
double r2_of_time(double t, double theta, double phi, const Scenario& s);

/// d r2 / dt of the above, by implicit differentiation. Throws
/// NearSingularError when the denominator bracket drops below 1e-9.
double r2_of_time_derivative(double t, double theta, double phi, const Scenario& s);

/// Truncation radius for the (unbounded) Lambertian radial support:
/// far enough out that the extinction factor makes the tail negligible.
double r2_truncation(const Scenario& s, double cap_m = 1e5);

geometry::IntegrationDomain make_domain(const Scenario& s);

/// Total received optical energy of the single-scatter link, in joules.
double total_energy(const Scenario& s, const quad::Config& cfg);

/// Received energy accumulated over [0, t]: the energy CDF.
double energy_cdf(const Scenario& s, double t, const quad::Config& cfg);

/// Channel impulse response h(t) in W/m^2.
double cir(const Scenario& s, double t, const quad::Config& cfg);

/// h sampled on a uniform grid with endpoints included (n_bins >= 2).
/// Grid points evaluate independently; this is the OpenMP kernel.
CirSeries cir_series(const Scenario& s, double t_start, double t_end, int n_bins,
                     const quad::Config& cfg);

/// Serial reference implementation of cir_series; bit-identical output.
CirSeries cir_series_serial(const Scenario& s, double t_start, double t_end, int n_bins,
                            const quad::Config& cfg);

/// h at caller-chosen times (used to match Monte-Carlo bin centers).
CirSeries cir_series_at(const Scenario& s, const std::vector<double>& times,
                        const quad::Config& cfg);

/// Automatic evaluation window [0.9 r/c, t_999] where t_999 is found by
/// bisecting the energy CDF at 99.9% of the total energy. Returns a
/// short window past r/c when the link receives no energy at all.
std::pair<double, double> default_time_window(const Scenario& s, const quad::Config& cfg);

}  // namespace uvscatter::single_scatter
