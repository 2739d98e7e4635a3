#include "uvscatter/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace uvscatter::io {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kPerKmToPerM = 1e-3;
constexpr double kCm2ToM2 = 1e-4;
constexpr double kNsToS = 1e-9;

void require_known_keys(const json& j, const std::string& where,
                        const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ScenarioError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ScenarioError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ScenarioError(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

struct FileFields {
  // geometry, degrees / meters
  double range_m = 100.0;
  double tx_inclination_deg = 60.0, tx_azimuth_deg = -90.0;
  double rx_inclination_deg = 60.0, rx_azimuth_deg = 90.0;
  double beam_full_angle_deg = 60.0, fov_full_angle_deg = 30.0;
  // emission
  std::string kind = "LD";
  // atmosphere, km^-1
  double k_s_rayleigh_per_km = 0.24, k_s_mie_per_km = 0.25, k_a_per_km = 0.9;
  double gamma = 0.017, g = 0.72, f = 0.5;
  // detector / pulse
  double detector_area_cm2 = 1.92;
  double pulse_energy_j = 1.0;
  // quadrature
  double rel_tol = 1e-6, abs_tol = 0.0;
  long long max_subdivisions = 1'000'000;
  // mc
  long long photons = 10'000'000;
  long long max_scatter_order = 3;
  double bin_width_ns = 2.0;
  std::uint64_t seed = 1;
  bool first_order_only = false;
};

FileFields parse_fields(const json& j) {
  require_known_keys(j, "scenario", {"geometry", "emission", "atmosphere", "detector_area_cm2",
                                     "pulse_energy_j", "quadrature", "mc"});
  FileFields f;
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    require_known_keys(g, "geometry",
                       {"range_m", "tx_inclination_deg", "tx_azimuth_deg", "rx_inclination_deg",
                        "rx_azimuth_deg", "beam_full_angle_deg", "fov_full_angle_deg"});
    read(g, "range_m", f.range_m);
    read(g, "tx_inclination_deg", f.tx_inclination_deg);
    read(g, "tx_azimuth_deg", f.tx_azimuth_deg);
    read(g, "rx_inclination_deg", f.rx_inclination_deg);
    read(g, "rx_azimuth_deg", f.rx_azimuth_deg);
    read(g, "beam_full_angle_deg", f.beam_full_angle_deg);
    read(g, "fov_full_angle_deg", f.fov_full_angle_deg);
  }
  if (j.contains("emission")) {
    const auto& e = j.at("emission");
    require_known_keys(e, "emission", {"kind"});
    read(e, "kind", f.kind);
    if (f.kind != "UD" && f.kind != "LD")
      throw ScenarioError("emission.kind must be \"UD\" or \"LD\"");
  }
  if (j.contains("atmosphere")) {
    const auto& a = j.at("atmosphere");
    require_known_keys(a, "atmosphere", {"k_s_rayleigh_per_km", "k_s_mie_per_km", "k_a_per_km",
                                         "gamma", "g", "f"});
    read(a, "k_s_rayleigh_per_km", f.k_s_rayleigh_per_km);
    read(a, "k_s_mie_per_km", f.k_s_mie_per_km);
    read(a, "k_a_per_km", f.k_a_per_km);
    read(a, "gamma", f.gamma);
    read(a, "g", f.g);
    read(a, "f", f.f);
  }
  read(j, "detector_area_cm2", f.detector_area_cm2);
  read(j, "pulse_energy_j", f.pulse_energy_j);
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    require_known_keys(q, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions"});
    read(q, "rel_tol", f.rel_tol);
    read(q, "abs_tol", f.abs_tol);
    read(q, "max_subdivisions", f.max_subdivisions);
  }
  if (j.contains("mc")) {
    const auto& m = j.at("mc");
    require_known_keys(m, "mc", {"photons", "max_scatter_order", "bin_width_ns", "seed",
                                 "first_order_only"});
    read(m, "photons", f.photons);
    read(m, "max_scatter_order", f.max_scatter_order);
    read(m, "bin_width_ns", f.bin_width_ns);
    read(m, "seed", f.seed);
    read(m, "first_order_only", f.first_order_only);
  }
  return f;
}

RunConfig to_run_config(const FileFields& f) {
  RunConfig rc;
  auto& geo = rc.scenario.geometry;
  geo.range_m = f.range_m;
  geo.tx_inclination_rad = f.tx_inclination_deg * kDegToRad;
  geo.tx_azimuth_rad = f.tx_azimuth_deg * kDegToRad;
  geo.rx_inclination_rad = f.rx_inclination_deg * kDegToRad;
  geo.rx_azimuth_rad = f.rx_azimuth_deg * kDegToRad;
  geo.beam_full_angle_rad = f.beam_full_angle_deg * kDegToRad;
  geo.fov_full_angle_rad = f.fov_full_angle_deg * kDegToRad;

  try {
    rc.scenario.emission = f.kind == "UD"
                               ? emission::Pattern::uniform_cone(geo.beam_full_angle_rad)
                               : emission::Pattern::lambertian(geo.beam_full_angle_rad);
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("emission: ") + e.what());
  }

  auto& atm = rc.scenario.atmosphere;
  atm.k_s_rayleigh = f.k_s_rayleigh_per_km * kPerKmToPerM;
  atm.k_s_mie = f.k_s_mie_per_km * kPerKmToPerM;
  atm.k_a = f.k_a_per_km * kPerKmToPerM;
  atm.gamma = f.gamma;
  atm.asymmetry = f.g;
  atm.forward_fraction = f.f;

  rc.scenario.detector_area_m2 = f.detector_area_cm2 * kCm2ToM2;
  rc.scenario.pulse_energy_j = f.pulse_energy_j;

  rc.quadrature.rel_tol = f.rel_tol;
  rc.quadrature.abs_tol = f.abs_tol;
  if (f.max_subdivisions < 1 || f.max_subdivisions > (1LL << 40))
    throw ScenarioError("quadrature.max_subdivisions out of range");
  rc.quadrature.max_subdivisions = static_cast<int>(std::min<long long>(f.max_subdivisions,
                                                                        1'000'000'000));
  if (!(rc.quadrature.rel_tol > 0.0) && !(rc.quadrature.abs_tol > 0.0))
    throw ScenarioError("quadrature: rel_tol or abs_tol must be positive");

  rc.mc.n_photons = f.photons;
  if (f.max_scatter_order < 1 || f.max_scatter_order > 1000)
    throw ScenarioError("mc.max_scatter_order out of range");
  rc.mc.max_scatter_order = static_cast<int>(f.max_scatter_order);
  rc.mc.bin_width_s = f.bin_width_ns * kNsToS;
  rc.mc.seed = f.seed;
  rc.mc.first_order_only = f.first_order_only;

  try {
    rc.scenario.validate();
    rc.mc.validate();
  } catch (const std::exception& e) {
    throw ScenarioError(e.what());
  }
  return rc;
}

}  // namespace

RunConfig default_run_config() { return to_run_config(FileFields{}); }

RunConfig parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  return to_run_config(parse_fields(j));
}

RunConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

std::string to_json(const RunConfig& rc) {
  const auto& geo = rc.scenario.geometry;
  const auto& atm = rc.scenario.atmosphere;
  json j;
  j["geometry"] = {{"range_m", geo.range_m},
                   {"tx_inclination_deg", geo.tx_inclination_rad / kDegToRad},
                   {"tx_azimuth_deg", geo.tx_azimuth_rad / kDegToRad},
                   {"rx_inclination_deg", geo.rx_inclination_rad / kDegToRad},
                   {"rx_azimuth_deg", geo.rx_azimuth_rad / kDegToRad},
                   {"beam_full_angle_deg", geo.beam_full_angle_rad / kDegToRad},
                   {"fov_full_angle_deg", geo.fov_full_angle_rad / kDegToRad}};
  j["emission"] = {{"kind", rc.scenario.emission.kind == emission::Kind::uniform_cone ? "UD"
                                                                                      : "LD"}};
  j["atmosphere"] = {{"k_s_rayleigh_per_km", atm.k_s_rayleigh / kPerKmToPerM},
                     {"k_s_mie_per_km", atm.k_s_mie / kPerKmToPerM},
                     {"k_a_per_km", atm.k_a / kPerKmToPerM},
                     {"gamma", atm.gamma},
                     {"g", atm.asymmetry},
                     {"f", atm.forward_fraction}};
  j["detector_area_cm2"] = rc.scenario.detector_area_m2 / kCm2ToM2;
  j["pulse_energy_j"] = rc.scenario.pulse_energy_j;
  j["quadrature"] = {{"rel_tol", rc.quadrature.rel_tol},
                     {"abs_tol", rc.quadrature.abs_tol},
                     {"max_subdivisions", rc.quadrature.max_subdivisions}};
  j["mc"] = {{"photons", rc.mc.n_photons},
             {"max_scatter_order", rc.mc.max_scatter_order},
             {"bin_width_ns", rc.mc.bin_width_s / kNsToS},
             {"seed", rc.mc.seed},
             {"first_order_only", rc.mc.first_order_only}};
  return j.dump(2) + "\n";
}

}  // namespace uvscatter::io
