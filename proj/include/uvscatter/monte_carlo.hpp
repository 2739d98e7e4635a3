#pragma once

#include <cstdint>
#include <vector>

#include "uvscatter/single_scatter.hpp"

namespace uvscatter::monte_carlo {

struct Config {
  long long n_photons = 0;
  int max_scatter_order = 3;
  double bin_width_s = 2e-9;
  std::uint64_t seed = 0;
  bool first_order_only = false;

  void validate() const;
};

/// Time-binned CIR estimate from photon transport with an expected-value
/// (shadow-ray) detector estimator. Bin k covers [k*bin_width, (k+1)*bin_width)
/// with t = 0 at emission; series.t_s holds the bin centers.
struct Estimate {
  single_scatter::CirSeries series;     // per-bin mean irradiance, W/m^2
  std::vector<double> per_bin_stderr;   // same shape as series.h_w_m2
  std::vector<double> per_order_energy; // received energy via order k = 1..max, J
  double q_r_estimate = 0.0;            // sum of per_order_energy, J
};

/// OpenMP kernel. Photon i draws from a counter-based stream keyed by
/// (seed, i) and photons are reduced in fixed-size blocks in block order,
/// so the result is bit-identical for any worker count.
Estimate simulate(const single_scatter::Scenario& s, const Config& cfg);

/// Serial reference implementation; bit-identical to simulate().
Estimate simulate_serial(const single_scatter::Scenario& s, const Config& cfg);

}  // namespace uvscatter::monte_carlo
