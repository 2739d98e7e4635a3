#pragma once

#include <stdexcept>
#include <string>

#include "uvscatter/monte_carlo.hpp"
#include "uvscatter/quadrature.hpp"
#include "uvscatter/single_scatter.hpp"

namespace uvscatter::io {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One scenario file: the link description plus the numerical knobs.
/// File units follow the usual presentation of the field (degrees,
/// km^-1, cm^2, ns); everything is converted to SI on load.
struct RunConfig {
  single_scatter::Scenario scenario;
  quad::Config quadrature;
  monte_carlo::Config mc;
};

/// Parses a scenario JSON document. Unknown keys are rejected; missing
/// keys take the built-in defaults. Throws ScenarioError with a
/// diagnostic on schema violations or invalid values.
RunConfig parse_scenario_json(const std::string& text);

RunConfig load_scenario_file(const std::string& path);

/// Serializes back to the file schema. parse(serialize(x)) is the
/// identity on the parsed values.
std::string to_json(const RunConfig& cfg);

RunConfig default_run_config();

}  // namespace uvscatter::io
