#include "uvscatter/metrics.hpp"

#include <cmath>
#include <limits>

namespace uvscatter::metrics {

namespace {

// Accumulates sum(w h), sum(w h t), sum(w h (t-mu)^2) under either rule.
template <class Term>
double accumulate(const single_scatter::CirSeries& s, MomentRule rule, Term&& term) {
  const auto& t = s.t_s;
  const std::size_t n = t.size();
  double acc = 0.0;
  if (rule == MomentRule::trapezoid) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      acc += 0.5 * (t[i + 1] - t[i]) * (term(i) + term(i + 1));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) acc += term(i);
  }
  return acc;
}

}  // namespace

DelayStats delay_spread(const single_scatter::CirSeries& series, MomentRule rule) {
  const auto& h = series.h_w_m2;
  if (series.t_s.size() != h.size() || series.t_s.empty())
    throw std::invalid_argument("delay_spread: malformed series");
  bool any = false;
  for (double v : h) any = any || v > 0.0;
  if (!any) throw EmptyChannelError("delay_spread: channel carries no energy");

  const double total = accumulate(series, rule, [&](std::size_t i) { return h[i]; });
  const double mean =
      accumulate(series, rule, [&](std::size_t i) { return series.t_s[i] * h[i]; }) / total;
  const double var = accumulate(series, rule,
                                [&](std::size_t i) {
                                  const double d = series.t_s[i] - mean;
                                  return d * d * h[i];
                                }) /
                     total;
  return {mean, std::sqrt(std::max(0.0, var))};
}

double path_loss_db(double q_r_j, double q_t_j) {
  if (!(q_t_j > 0.0)) throw std::domain_error("path_loss_db: transmitted energy must be > 0");
  if (!(q_r_j >= 0.0)) throw std::domain_error("path_loss_db: received energy must be >= 0");
  if (q_r_j == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(q_r_j / q_t_j);
}

ChannelMetrics channel_metrics(const single_scatter::CirSeries& series, double q_r_j,
                               double q_t_j, MomentRule rule) {
  const DelayStats d = delay_spread(series, rule);
  return {d.mean_delay_s, d.delay_spread_s, path_loss_db(q_r_j, q_t_j), q_r_j};
}

}  // namespace uvscatter::metrics
