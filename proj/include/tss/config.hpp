#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "tss/bench.hpp"
#include "tss/dgp.hpp"
#include "tss/penreg.hpp"
#include "tss/screen.hpp"

namespace tss {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// SimDesign <-> JSON. The schema is strict: unknown keys are rejected.
nlohmann::json design_to_json(const SimDesign& design);
SimDesign design_from_json(const nlohmann::json& j);

/// Cell selector for table presets, e.g. "gaussian,gamma=.4,alpha=.6,p=1000".
struct PresetCell {
  std::optional<PresetDist> dist;
  std::optional<double> gamma;
  std::optional<double> alpha;
  std::optional<int> p;
};
PresetCell parse_cell(const std::string& spec);

/// Fully resolved run configuration; every field has its final value so a
/// dump of this struct specifies the run post hoc.
struct RunConfig {
  std::string command;  // simulate | screen | twostage | forecast | depmeas

  // dataset input
  std::string data_path;
  bool has_header = true;
  std::string time_column;  // empty = none
  std::string target;       // response column, or price-index level column (forecast)

  // design input
  std::optional<SimDesign> design;
  std::string preset;  // table1..table5 | figure1 | table6-format | c1 | c2a | c2b | c3a | c3b
  std::string cell;
  int replication = 0;  // simulate: which replication to write

  // method
  std::string method = "glss";  // sis | glss | none (twostage first stage)
  int band = 15;
  bool taper = true;
  bool standardize = true;

  // selection / stage two
  int d_n = 0;           // 0 = context default (n-1 for experiments)
  double gamma_n = -1.0;  // threshold rule when >= 0
  int grid_size = 100;

  // experiment
  int reps = 200;
  std::uint64_t seed = 0;
  int jobs = 0;  // 0 = all cores

  // forecast
  ForecastConfig forecast;

  // depmeas payload (validated by the runner)
  nlohmann::json depmeas;

  // output
  std::string out_path;       // empty = stdout
  std::string format = "csv";  // csv | json
};

/// Parses a config file object. Unknown keys anywhere fail validation.
RunConfig parse_run_config(const nlohmann::json& j);

/// Resolved dump (defaults filled in) for --explain and report audit trails.
nlohmann::json run_config_to_json(const RunConfig& config);

}  // namespace tss
