// Times the OpenMP kernels against their serial reference twins, plus the
// analytic-vs-MC headline comparison, on a scenario file.
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include "uvscatter/metrics.hpp"
#include "uvscatter/monte_carlo.hpp"
#include "uvscatter/scenario_io.hpp"
#include "uvscatter/single_scatter.hpp"
#include "uvscatter/threads.hpp"

namespace ss = uvscatter::single_scatter;
namespace mc = uvscatter::monte_carlo;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::string scenario_path;
  long long photons = 1'000'000;
  int bins = 512;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--photons" && i + 1 < argc) {
      photons = std::atoll(argv[++i]);
    } else if (arg == "--bins" && i + 1 < argc) {
      bins = std::atoi(argv[++i]);
    } else if (scenario_path.empty() && arg[0] != '-') {
      scenario_path = arg;
    } else {
      std::cerr << "usage: uvscatter_bench [scenario.json] [--photons N] [--bins N]\n";
      return 2;
    }
  }

  uvscatter::io::RunConfig rc =
      scenario_path.empty() ? uvscatter::io::default_run_config()
                            : uvscatter::io::load_scenario_file(scenario_path);
  rc.mc.n_photons = photons;
  rc.quadrature.rel_tol = std::max(rc.quadrature.rel_tol, 1e-5);

  std::cout << "workers: " << uvscatter::threads::worker_count() << "\n";

  const auto [t0, t1] = ss::default_time_window(rc.scenario, rc.quadrature);

  auto clock = std::chrono::steady_clock::now();
  const auto serial = ss::cir_series_serial(rc.scenario, t0, t1, bins, rc.quadrature);
  const double series_serial_s = seconds_since(clock);

  clock = std::chrono::steady_clock::now();
  const auto parallel = ss::cir_series(rc.scenario, t0, t1, bins, rc.quadrature);
  const double series_parallel_s = seconds_since(clock);

  bool identical = serial.h_w_m2 == parallel.h_w_m2;
  std::cout << "cir_series  " << bins << " bins:   serial " << series_serial_s
            << " s,  openmp " << series_parallel_s << " s,  speedup "
            << series_serial_s / series_parallel_s << (identical ? "" : "  [MISMATCH]") << "\n";

  clock = std::chrono::steady_clock::now();
  const auto mc_serial = mc::simulate_serial(rc.scenario, rc.mc);
  const double mc_serial_s = seconds_since(clock);

  clock = std::chrono::steady_clock::now();
  const auto mc_parallel = mc::simulate(rc.scenario, rc.mc);
  const double mc_parallel_s = seconds_since(clock);

  identical = mc_serial.series.h_w_m2 == mc_parallel.series.h_w_m2 &&
              mc_serial.q_r_estimate == mc_parallel.q_r_estimate;
  std::cout << "monte_carlo " << photons << " photons:  serial " << mc_serial_s
            << " s,  openmp " << mc_parallel_s << " s,  speedup " << mc_serial_s / mc_parallel_s
            << (identical ? "" : "  [MISMATCH]") << "\n";

  std::cout << "analytic vs MC wall-time ratio: "
            << series_parallel_s / mc_parallel_s * 100.0 << "% at " << photons << " photons\n";
  return 0;
}
