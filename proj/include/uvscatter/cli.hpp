#pragma once

#include <string>
#include <vector>

#include "uvscatter/metrics.hpp"
#include "uvscatter/monte_carlo.hpp"
#include "uvscatter/scenario_io.hpp"

namespace uvscatter::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitValidation = 4;

/// Entry point behind main(); parses argv and dispatches subcommands.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

struct ValidationReport {
  double analytic_wall_s = 0.0;
  double mc_first_wall_s = 0.0;
  double mc_overall_wall_s = 0.0;
  metrics::ChannelMetrics analytic;
  metrics::ChannelMetrics mc_first;
  metrics::ChannelMetrics mc_overall;
  long long n_significant = 0;   // bins with MC mean > 5x stderr
  long long n_within = 0;        // of those, within 3x stderr of analytic
  double agreement_fraction = 0.0;
  bool insufficient_statistics = false;
  bool pass = false;
};

/// Analytic-vs-MC cross validation. The Monte-Carlo paths run on
/// `mc_scenario`, which the CLI always sets equal to `cfg.scenario`;
/// tests may pass a perturbed copy as a negative control.
ValidationReport run_validation(const io::RunConfig& cfg,
                                const single_scatter::Scenario& mc_scenario);

std::string validation_report_json(const ValidationReport& r);

}  // namespace uvscatter::cli
