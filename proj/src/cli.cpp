#include "uvscatter/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "uvscatter/threads.hpp"

namespace uvscatter::cli {

namespace {

using single_scatter::CirSeries;
using single_scatter::Scenario;

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double wall_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::ScenarioError("cannot open output file: " + path);
  for (std::size_t c = 0; c < header.size(); ++c) {
    out << header[c] << (c + 1 < header.size() ? "," : "\n");
  }
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << format_double(columns[c][r]) << (c + 1 < columns.size() ? "," : "\n");
    }
  }
  if (!out) throw io::ScenarioError("failed writing output file: " + path);
}

// Minimal SVG polyline chart; purely cosmetic output.
void write_svg(const std::string& path, const std::string& title,
               const std::vector<double>& x,
               const std::vector<std::pair<std::string, const std::vector<double>*>>& series) {
  const int w = 800, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
  for (double v : x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
  for (const auto& [_, ys] : series) {
    for (double v : *ys) ymax = std::max(ymax, v);
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (w - ml - mr); };
  const auto py = [&](double v) { return h - mb - (v - ymin) / (ymax - ymin) * (h - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::ScenarioError("cannot open output file: " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n"
      << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
      << "' stroke='black'/>\n"
      << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
      << "' stroke='black'/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + i * (xmax - xmin) / 4.0;
    const double yv = ymin + i * (ymax - ymin) / 4.0;
    out << "<text x='" << px(xv) << "' y='" << h - mb + 18
        << "' text-anchor='middle' font-size='11'>" << format_double(xv) << "</text>\n"
        << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
        << "' text-anchor='end' font-size='11'>" << format_double(yv) << "</text>\n";
  }
  int idx = 0;
  for (const auto& [name, ys] : series) {
    out << "<polyline fill='none' stroke='" << colors[idx % 4] << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < x.size() && i < ys->size(); ++i) {
      out << px(x[i]) << "," << py((*ys)[i]) << " ";
    }
    out << "'/>\n<text x='" << w - mr - 150 << "' y='" << mt + 16 * (idx + 1)
        << "' font-size='12' fill='" << colors[idx % 4] << "'>" << name << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

struct CirOptions {
  std::string scenario_path;
  std::optional<double> t_start, t_end;
  int bins = 2048;
  std::string out_path;
  std::string plot_path;
  bool with_mc = false;
  std::optional<long long> photons;
  std::optional<int> order;
  std::optional<std::uint64_t> seed;
};

int cmd_cir(const CirOptions& opt) {
  io::RunConfig rc;
  try {
    rc = io::load_scenario_file(opt.scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    double t0, t1;
    if (opt.t_start && opt.t_end) {
      t0 = *opt.t_start;
      t1 = *opt.t_end;
      if (!(t1 > t0)) {
        std::cerr << "error: --t-end must exceed --t-start\n";
        return kExitConfig;
      }
    } else {
      std::tie(t0, t1) = single_scatter::default_time_window(rc.scenario, rc.quadrature);
    }

    std::vector<std::string> header{"t_s", "h_W_per_m2"};
    std::vector<std::vector<double>> cols;
    CirSeries analytic;

    if (opt.with_mc) {
      monte_carlo::Config mcfg = rc.mc;
      if (opt.photons) mcfg.n_photons = *opt.photons;
      if (opt.order) mcfg.max_scatter_order = *opt.order;
      if (opt.seed) mcfg.seed = *opt.seed;
      mcfg.first_order_only = mcfg.max_scatter_order == 1;
      mcfg.bin_width_s = (t1 - t0) / opt.bins;
      const auto est = monte_carlo::simulate(rc.scenario, mcfg);

      // Evaluate the analytic CIR at the MC bin centers so the columns
      // line up exactly.
      const long k0 = static_cast<long>(std::floor(t0 / mcfg.bin_width_s));
      std::vector<double> times(opt.bins);
      for (int i = 0; i < opt.bins; ++i) times[i] = (k0 + i + 0.5) * mcfg.bin_width_s;
      analytic = single_scatter::cir_series_at(rc.scenario, times, rc.quadrature);

      std::vector<double> mc_h(opt.bins, 0.0), mc_se(opt.bins, 0.0);
      for (int i = 0; i < opt.bins; ++i) {
        const long bin = k0 + i;
        if (bin >= 0 && bin < static_cast<long>(est.series.h_w_m2.size())) {
          mc_h[i] = est.series.h_w_m2[bin];
          mc_se[i] = est.per_bin_stderr[bin];
        }
      }
      header.insert(header.end(), {"mc_h", "mc_stderr"});
      cols = {analytic.t_s, analytic.h_w_m2, std::move(mc_h), std::move(mc_se)};
    } else {
      analytic = single_scatter::cir_series(rc.scenario, t0, t1, opt.bins, rc.quadrature);
      cols = {analytic.t_s, analytic.h_w_m2};
    }

    write_csv(opt.out_path, header, cols);
    if (!opt.plot_path.empty()) {
      std::vector<std::pair<std::string, const std::vector<double>*>> lines{
          {"analytic", &cols[1]}};
      if (opt.with_mc) lines.push_back({"mc", &cols[2]});
      write_svg(opt.plot_path, "channel impulse response", cols[0], lines);
    }
    return kExitOk;
  } catch (const quad::ToleranceNotReached& e) {
    std::cerr << "error: " << e.what() << " (best value " << e.best.value << ", estimate "
              << e.best.error << ")\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

struct SweepOptions {
  std::string scenario_path;
  std::string param;
  double from = 0.0, to = 0.0;
  int steps = 1;
  int bins = 1024;
  std::string out_path;
  std::string plot_path;
};

int cmd_sweep(const SweepOptions& opt) {
  io::RunConfig rc;
  try {
    rc = io::load_scenario_file(opt.scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    std::vector<double> values(opt.steps);
    for (int i = 0; i < opt.steps; ++i) {
      values[i] = opt.steps == 1 ? opt.from
                                 : opt.from + i * (opt.to - opt.from) / (opt.steps - 1);
    }

    std::vector<double> ds(opt.steps), pl(opt.steps);
    for (int i = 0; i < opt.steps; ++i) {
      Scenario sc = rc.scenario;
      if (opt.param == "r") {
        sc.geometry.range_m = values[i];
      } else if (opt.param == "phi_R") {
        sc.geometry.rx_azimuth_rad = values[i] * kDegToRad;
      } else if (opt.param == "beta_R") {
        sc.geometry.fov_full_angle_rad = values[i] * kDegToRad;
      } else if (opt.param == "theta") {
        sc.geometry.tx_inclination_rad = values[i] * kDegToRad;
        sc.geometry.rx_inclination_rad = values[i] * kDegToRad;
      } else {
        std::cerr << "error: unknown sweep parameter '" << opt.param << "'\n";
        return kExitConfig;
      }
      sc.validate();

      const auto [t0, t1] = single_scatter::default_time_window(sc, rc.quadrature);
      const CirSeries series = single_scatter::cir_series(sc, t0, t1, opt.bins, rc.quadrature);
      const double q_r = single_scatter::total_energy(sc, rc.quadrature);
      const auto stats = metrics::delay_spread(series);
      ds[i] = stats.delay_spread_s;
      pl[i] = metrics::path_loss_db(q_r, sc.pulse_energy_j);
    }

    write_csv(opt.out_path, {"param", "DS_s", "PL_dB"}, {values, ds, pl});
    if (!opt.plot_path.empty()) {
      write_svg(opt.plot_path, "sweep over " + opt.param, values,
                {{"DS_s", &ds}, {"PL_dB", &pl}});
    }
    return kExitOk;
  } catch (const quad::ToleranceNotReached& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const metrics::EmptyChannelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

struct ValidateOptions {
  std::string scenario_path;
  std::optional<long long> photons;
  std::optional<std::uint64_t> seed;
  std::string report_path = "validation_report.json";
};

int cmd_validate(const ValidateOptions& opt) {
  io::RunConfig rc;
  try {
    rc = io::load_scenario_file(opt.scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (opt.photons) rc.mc.n_photons = *opt.photons;
  if (opt.seed) rc.mc.seed = *opt.seed;

  try {
    const ValidationReport rep = run_validation(rc, rc.scenario);
    std::ofstream out(opt.report_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open report file: " << opt.report_path << "\n";
      return kExitConfig;
    }
    out << validation_report_json(rep);

    std::cout << "analytic: DS " << rep.analytic.delay_spread_s << " s, PL "
              << rep.analytic.path_loss_db << " dB, wall " << rep.analytic_wall_s << " s\n"
              << "mc 1st order: DS " << rep.mc_first.delay_spread_s << " s, PL "
              << rep.mc_first.path_loss_db << " dB, wall " << rep.mc_first_wall_s << " s\n"
              << "mc overall: PL " << rep.mc_overall.path_loss_db << " dB, wall "
              << rep.mc_overall_wall_s << " s\n"
              << "agreement: " << rep.n_within << "/" << rep.n_significant
              << " significant bins within 3 sigma";
    if (rep.insufficient_statistics) std::cout << " (insufficient statistics)";
    std::cout << "\nresult: " << (rep.pass ? "PASS" : "FAIL") << "\n";
    return rep.pass ? kExitOk : kExitValidation;
  } catch (const quad::ToleranceNotReached& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

ValidationReport run_validation(const io::RunConfig& cfg,
                                const single_scatter::Scenario& mc_scenario) {
  ValidationReport rep;
  const auto& sc = cfg.scenario;
  const double q_t = sc.pulse_energy_j;

  const auto [t0, t1] = single_scatter::default_time_window(sc, cfg.quadrature);
  const double dt = cfg.mc.bin_width_s;
  const long k0 = std::max(0L, static_cast<long>(std::floor(t0 / dt)));
  const long k1 = static_cast<long>(std::ceil(t1 / dt));

  monte_carlo::Config first_cfg = cfg.mc;
  first_cfg.first_order_only = true;
  auto clock0 = std::chrono::steady_clock::now();
  const auto mc_first = monte_carlo::simulate(mc_scenario, first_cfg);
  rep.mc_first_wall_s = wall_seconds(clock0);

  monte_carlo::Config overall_cfg = cfg.mc;
  overall_cfg.first_order_only = false;
  clock0 = std::chrono::steady_clock::now();
  const auto mc_overall = monte_carlo::simulate(mc_scenario, overall_cfg);
  rep.mc_overall_wall_s = wall_seconds(clock0);

  std::vector<double> times(k1 - k0 + 1);
  for (long i = 0; i <= k1 - k0; ++i) times[i] = (k0 + i + 0.5) * dt;
  clock0 = std::chrono::steady_clock::now();
  const CirSeries analytic = single_scatter::cir_series_at(sc, times, cfg.quadrature);
  const double q_r = single_scatter::total_energy(sc, cfg.quadrature);
  rep.analytic_wall_s = wall_seconds(clock0);

  rep.analytic = metrics::channel_metrics(analytic, q_r, q_t);
  rep.mc_first = metrics::channel_metrics(mc_first.series, mc_first.per_order_energy[0], q_t,
                                          metrics::MomentRule::bin_midpoint);
  rep.mc_overall = metrics::channel_metrics(mc_overall.series, mc_overall.q_r_estimate, q_t,
                                            metrics::MomentRule::bin_midpoint);

  for (long i = 0; i <= k1 - k0; ++i) {
    const long bin = k0 + i;
    if (bin < 0 || bin >= static_cast<long>(mc_first.series.h_w_m2.size())) continue;
    const double mh = mc_first.series.h_w_m2[bin];
    const double se = mc_first.per_bin_stderr[bin];
    if (!(mh > 5.0 * se) || se == 0.0) continue;
    ++rep.n_significant;
    if (std::abs(analytic.h_w_m2[i] - mh) <= 3.0 * se) ++rep.n_within;
  }
  rep.agreement_fraction =
      rep.n_significant > 0 ? static_cast<double>(rep.n_within) / rep.n_significant : 0.0;
  rep.insufficient_statistics = rep.n_significant < 10;
  rep.pass = rep.insufficient_statistics || rep.agreement_fraction >= 0.95;
  return rep;
}

std::string validation_report_json(const ValidationReport& r) {
  nlohmann::json j;
  const auto metrics_json = [](const metrics::ChannelMetrics& m) {
    return nlohmann::json{{"mean_delay_s", m.mean_delay_s},
                          {"delay_spread_s", m.delay_spread_s},
                          {"path_loss_db", std::isfinite(m.path_loss_db) ? m.path_loss_db : 1e9},
                          {"total_energy_j", m.total_energy_j}};
  };
  j["analytic"] = metrics_json(r.analytic);
  j["analytic"]["wall_s"] = r.analytic_wall_s;
  j["mc_first_order"] = metrics_json(r.mc_first);
  j["mc_first_order"]["wall_s"] = r.mc_first_wall_s;
  j["mc_overall"] = metrics_json(r.mc_overall);
  j["mc_overall"]["wall_s"] = r.mc_overall_wall_s;
  j["agreement"] = {{"significant_bins", r.n_significant},
                    {"within_3_sigma", r.n_within},
                    {"fraction", r.agreement_fraction},
                    {"insufficient_statistics", r.insufficient_statistics},
                    {"pass", r.pass}};
  return j.dump(2) + "\n";
}

int run(int argc, const char* const* argv) {
  CLI::App app{"single-scatter NLOS ultraviolet channel model"};
  app.require_subcommand(1);

  CirOptions cir_opt;
  auto* cir_cmd = app.add_subcommand("cir", "compute the channel impulse response as CSV");
  cir_cmd->add_option("scenario", cir_opt.scenario_path, "scenario JSON file")->required();
  double t_start = 0.0, t_end = 0.0;
  auto* ts = cir_cmd->add_option("--t-start", t_start, "window start, seconds");
  auto* te = cir_cmd->add_option("--t-end", t_end, "window end, seconds");
  cir_cmd->add_option("--bins", cir_opt.bins, "number of samples")->check(CLI::Range(2, 1 << 22));
  cir_cmd->add_option("--out", cir_opt.out_path, "output CSV path")->required();
  cir_cmd->add_option("--plot", cir_opt.plot_path, "optional SVG chart path");
  cir_cmd->add_flag("--mc", cir_opt.with_mc, "add Monte-Carlo columns");
  long long photons = 0;
  auto* ph = cir_cmd->add_option("--photons", photons, "MC photon count");
  int order = 0;
  auto* od = cir_cmd->add_option("--order", order, "MC max scattering order");
  std::uint64_t seed = 0;
  auto* sd = cir_cmd->add_option("--seed", seed, "MC random seed");

  SweepOptions sweep_opt;
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep a parameter, tabulating DS and PL");
  sweep_cmd->add_option("scenario", sweep_opt.scenario_path, "scenario JSON file")->required();
  sweep_cmd->add_option("--param", sweep_opt.param, "one of r, phi_R, beta_R, theta")
      ->required();
  sweep_cmd->add_option("--from", sweep_opt.from, "first value (m or deg)")->required();
  sweep_cmd->add_option("--to", sweep_opt.to, "last value (m or deg)")->required();
  sweep_cmd->add_option("--steps", sweep_opt.steps, "number of points")
      ->check(CLI::Range(1, 100000));
  sweep_cmd->add_option("--bins", sweep_opt.bins, "CIR samples per point")
      ->check(CLI::Range(2, 1 << 22));
  sweep_cmd->add_option("--out", sweep_opt.out_path, "output CSV path")->required();
  sweep_cmd->add_option("--plot", sweep_opt.plot_path, "optional SVG chart path");

  ValidateOptions val_opt;
  auto* val_cmd = app.add_subcommand("validate", "cross-check the analytic CIR against MC");
  val_cmd->add_option("scenario", val_opt.scenario_path, "scenario JSON file")->required();
  long long val_photons = 0;
  auto* vph = val_cmd->add_option("--photons", val_photons, "MC photon count");
  std::uint64_t val_seed = 0;
  auto* vsd = val_cmd->add_option("--seed", val_seed, "MC random seed");
  val_cmd->add_option("--report", val_opt.report_path, "report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (cir_cmd->parsed()) {
    if (ts->count()) cir_opt.t_start = t_start;
    if (te->count()) cir_opt.t_end = t_end;
    if (ts->count() != te->count()) {
      std::cerr << "error: --t-start and --t-end must be given together\n";
      return kExitConfig;
    }
    if (ph->count()) cir_opt.photons = photons;
    if (od->count()) cir_opt.order = order;
    if (sd->count()) cir_opt.seed = seed;
    return cmd_cir(cir_opt);
  }
  if (sweep_cmd->parsed()) return cmd_sweep(sweep_opt);
  if (val_cmd->parsed()) {
    if (vph->count()) val_opt.photons = val_photons;
    if (vsd->count()) val_opt.seed = val_seed;
    return cmd_validate(val_opt);
  }
  return kExitConfig;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("uvscatter");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace uvscatter::cli
