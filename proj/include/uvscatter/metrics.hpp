#pragma once

#include <stdexcept>

#include "uvscatter/single_scatter.hpp"

namespace uvscatter::metrics {

class EmptyChannelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// How discrete moments are taken from a sampled CIR: trapezoid weights
/// for point samples on a grid, equal weights for histogram bins.
enum class MomentRule { trapezoid, bin_midpoint };

struct DelayStats {
  double mean_delay_s = 0.0;
  double delay_spread_s = 0.0;
};

/// Mean delay and RMS delay spread of a CIR. Throws EmptyChannelError
/// when every sample is zero.
DelayStats delay_spread(const single_scatter::CirSeries& series,
                        MomentRule rule = MomentRule::trapezoid);

/// Path loss -10 log10(q_r / q_t) in dB; +infinity when q_r = 0.
double path_loss_db(double q_r_j, double q_t_j);

struct ChannelMetrics {
  double mean_delay_s = 0.0;
  double delay_spread_s = 0.0;
  double path_loss_db = 0.0;
  double total_energy_j = 0.0;
};

ChannelMetrics channel_metrics(const single_scatter::CirSeries& series, double q_r_j,
                               double q_t_j, MomentRule rule = MomentRule::trapezoid);

}  // namespace uvscatter::metrics
