#include "tss/config.hpp"

#include <set>

namespace tss {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(where + " rows are ragged");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json innovation_to_json(const InnovationSpec& s) {
  json j;
  j["kind"] = s.kind == InnovKind::Gaussian ? "gaussian" : "student-t";
  if (s.kind == InnovKind::StudentT) j["dof"] = s.dof;
  json cov;
  switch (s.cov) {
    case InnovCov::Identity:
      cov["kind"] = "identity";
      break;
    case InnovCov::ToeplitzRho:
      cov["kind"] = "toeplitz";
      cov["rho"] = s.rho;
      break;
    case InnovCov::Equicorrelated:
      cov["kind"] = "equicorrelated";
      cov["rho"] = s.rho;
      break;
    case InnovCov::Explicit:
      cov["kind"] = "explicit";
      cov["matrix"] = matrix_to_json(s.cov_matrix);
      break;
  }
  j["cov"] = cov;
  return j;
}

InnovationSpec innovation_from_json(const json& j, const std::string& where) {
  check_keys(j, {"kind", "dof", "cov", "variance"}, where);
  InnovationSpec s;
  const std::string kind = j.value("kind", "gaussian");
  if (kind == "gaussian")
    s.kind = InnovKind::Gaussian;
  else if (kind == "student-t" || kind == "t")
    s.kind = InnovKind::StudentT;
  else
    throw ConfigError("unknown innovation kind '" + kind + "' in " + where);
  if (j.contains("dof")) s.dof = j["dof"].get<int>();
  if (j.contains("variance")) {
    if (j.contains("cov")) throw ConfigError(where + ": give either 'variance' or 'cov'");
    const double v = j["variance"].get<double>();
    return scalar_innovation(s.kind, v, s.dof);
  }
  if (j.contains("cov")) {
    const json& cov = j["cov"];
    check_keys(cov, {"kind", "rho", "matrix"}, where + ".cov");
    const std::string ck = cov.value("kind", "identity");
    if (ck == "identity") {
      s.cov = InnovCov::Identity;
    } else if (ck == "toeplitz") {
      s.cov = InnovCov::ToeplitzRho;
      s.rho = cov.at("rho").get<double>();
    } else if (ck == "equicorrelated") {
      s.cov = InnovCov::Equicorrelated;
      s.rho = cov.at("rho").get<double>();
    } else if (ck == "explicit") {
      s.cov = InnovCov::Explicit;
      s.cov_matrix = matrix_from_json(cov.at("matrix"), where + ".cov.matrix");
    } else {
      throw ConfigError("unknown covariance kind '" + ck + "' in " + where);
    }
  }
  return s;
}

json coef_to_json(const VarCoefSpec& s) {
  json j;
  switch (s.kind) {
    case CoefKind::Diag:
      j["kind"] = "diag";
      j["value"] = s.value;
      break;
    case CoefKind::PowerToeplitz:
      j["kind"] = "power-toeplitz";
      j["value"] = s.value;
      break;
    case CoefKind::Explicit:
      j["kind"] = "explicit";
      j["matrix"] = matrix_to_json(s.matrix);
      break;
  }
  return j;
}

VarCoefSpec coef_from_json(const json& j, int p, const std::string& where) {
  check_keys(j, {"kind", "value", "matrix"}, where);
  VarCoefSpec s;
  s.p = p;
  const std::string kind = j.value("kind", "diag");
  if (kind == "diag") {
    s.kind = CoefKind::Diag;
    s.value = j.at("value").get<double>();
  } else if (kind == "power-toeplitz") {
    s.kind = CoefKind::PowerToeplitz;
    s.value = j.at("value").get<double>();
  } else if (kind == "explicit") {
    s.kind = CoefKind::Explicit;
    s.matrix = matrix_from_json(j.at("matrix"), where + ".matrix");
  } else {
    throw ConfigError("unknown coefficient kind '" + kind + "' in " + where);
  }
  return s;
}

}  // namespace

nlohmann::json design_to_json(const SimDesign& design) {
  json j;
  j["id"] = design.id;
  j["n"] = design.n;
  j["p"] = design.p;
  j["burn_in"] = design.burn_in;
  j["seed"] = design.seed;
  json beta;
  json idx = json::array(), val = json::array();
  for (int k = 0; k < design.beta.size(); ++k) {
    if (design.beta[k] != 0.0) {
      idx.push_back(k);
      val.push_back(design.beta[k]);
    }
  }
  beta["indices"] = idx;
  beta["values"] = val;
  j["beta"] = beta;
  j["covariates"] = {{"coef", coef_to_json(design.coef)},
                     {"innovation", innovation_to_json(design.innov)}};
  j["errors"] = {{"alpha", design.errors.alpha},
                 {"innovation", innovation_to_json(design.errors.innovation)}};
  return j;
}

SimDesign design_from_json(const nlohmann::json& j) {
  check_keys(j, {"id", "n", "p", "burn_in", "seed", "beta", "covariates", "errors"}, "design");
  SimDesign d;
  d.n = j.at("n").get<int>();
  d.p = j.at("p").get<int>();
  d.burn_in = j.value("burn_in", 500);
  d.seed = j.value("seed", std::uint64_t{0});
  d.id = j.value("id", "");
  if (d.n < 2 || d.p < 1) throw ConfigError("design needs n >= 2 and p >= 1");
  if (d.burn_in < 0) throw ConfigError("burn_in must be nonnegative");

  const json& beta = j.at("beta");
  check_keys(beta, {"indices", "values"}, "design.beta");
  d.beta = Eigen::VectorXd::Zero(d.p);
  const json& values = beta.at("values");
  if (beta.contains("indices")) {
    const json& indices = beta["indices"];
    if (indices.size() != values.size())
      throw ConfigError("design.beta indices and values differ in length");
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const int i = indices[k].get<int>();
      if (i < 0 || i >= d.p) throw ConfigError("design.beta index out of range");
      d.beta[i] = values[k].get<double>();
    }
  } else {
    if (static_cast<int>(values.size()) > d.p)
      throw ConfigError("design.beta has more values than p");
    for (std::size_t k = 0; k < values.size(); ++k) d.beta[k] = values[k].get<double>();
  }

  const json& cov = j.at("covariates");
  check_keys(cov, {"coef", "innovation"}, "design.covariates");
  d.coef = coef_from_json(cov.at("coef"), d.p, "design.covariates.coef");
  d.innov = innovation_from_json(cov.at("innovation"), "design.covariates.innovation");

  const json& err = j.at("errors");
  check_keys(err, {"alpha", "innovation"}, "design.errors");
  d.errors.alpha = err.at("alpha").get<double>();
  if (err.contains("innovation"))
    d.errors.innovation = innovation_from_json(err["innovation"], "design.errors.innovation");
  return d;
}

PresetCell parse_cell(const std::string& spec) {
  PresetCell cell;
  std::size_t pos = 0;
  while (pos <= spec.size() && !spec.empty()) {
    std::size_t next = spec.find(',', pos);
    if (next == std::string::npos) next = spec.size();
    const std::string token = spec.substr(pos, next - pos);
    pos = next + 1;
    if (token.empty()) continue;
    const std::size_t eq = token.find('=');
    if (eq == std::string::npos) {
      if (token == "gaussian")
        cell.dist = PresetDist::Gaussian;
      else if (token == "t5")
        cell.dist = PresetDist::T5;
      else
        throw ConfigError("unknown cell token '" + token + "'");
    } else {
      const std::string key = token.substr(0, eq);
      const std::string val = token.substr(eq + 1);
      try {
        if (key == "gamma")
          cell.gamma = std::stod(val);
        else if (key == "alpha")
          cell.alpha = std::stod(val);
        else if (key == "p")
          cell.p = std::stoi(val);
        else
          throw ConfigError("unknown cell key '" + key + "'");
      } catch (const ConfigError&) {
        throw;
      } catch (...) {
        throw ConfigError("bad cell value in '" + token + "'");
      }
    }
    if (next == spec.size()) break;
  }
  return cell;
}

RunConfig parse_run_config(const nlohmann::json& j) {
  check_keys(j,
             {"command", "dataset", "design", "preset", "cell", "replication", "method",
              "selection", "reps", "seed", "jobs", "forecast", "depmeas", "output"},
             "config");
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  if (c.command != "simulate" && c.command != "screen" && c.command != "twostage" &&
      c.command != "forecast" && c.command != "depmeas")
    throw ConfigError("unknown command '" + c.command + "'");

  if (j.contains("dataset")) {
    const json& d = j["dataset"];
    check_keys(d, {"path", "has_header", "time_column", "target"}, "dataset");
    c.data_path = d.at("path").get<std::string>();
    c.has_header = d.value("has_header", true);
    c.time_column = d.value("time_column", "");
    c.target = d.value("target", "");
  }
  if (j.contains("design")) c.design = design_from_json(j["design"]);
  c.preset = j.value("preset", "");
  c.cell = j.value("cell", "");
  c.replication = j.value("replication", 0);

  if (j.contains("method")) {
    const json& m = j["method"];
    check_keys(m, {"screen", "band", "taper", "standardize", "grid_size"}, "method");
    c.method = m.value("screen", c.method);
    if (c.method != "sis" && c.method != "glss" && c.method != "none")
      throw ConfigError("method.screen must be sis, glss or none");
    c.band = m.value("band", c.band);
    c.taper = m.value("taper", c.taper);
    c.standardize = m.value("standardize", c.standardize);
    c.grid_size = m.value("grid_size", c.grid_size);
  }
  if (j.contains("selection")) {
    const json& s = j["selection"];
    check_keys(s, {"top", "threshold"}, "selection");
    if (s.contains("top") && s.contains("threshold"))
      throw ConfigError("selection: give either 'top' or 'threshold'");
    if (s.contains("top")) c.d_n = s["top"].get<int>();
    if (s.contains("threshold")) c.gamma_n = s["threshold"].get<double>();
  }
  c.reps = j.value("reps", c.reps);
  c.seed = j.value("seed", c.seed);
  c.jobs = j.value("jobs", c.jobs);

  if (j.contains("forecast")) {
    const json& f = j["forecast"];
    check_keys(f,
               {"horizon", "lags", "predictor_lags", "factors", "window", "first_origin", "step",
                "n_forecasts", "models", "d_n"},
               "forecast");
    c.forecast.horizon = f.value("horizon", 12);
    c.forecast.lags = f.value("lags", 4);
    c.forecast.predictor_lags = f.value("predictor_lags", 3);
    c.forecast.factor_count = f.value("factors", 4);
    c.forecast.window_length = f.value("window", 0);
    c.forecast.first_origin = f.value("first_origin", -1);
    c.forecast.step = f.value("step", 1);
    c.forecast.n_forecasts = f.value("n_forecasts", 0);
    c.forecast.d_n = f.value("d_n", 73);
    if (f.contains("models"))
      for (const auto& name : f["models"])
        c.forecast.models.push_back(forecast_model_from_string(name.get<std::string>()));
  }
  if (j.contains("depmeas")) c.depmeas = j["depmeas"];

  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, {"path", "format"}, "output");
    c.out_path = o.value("path", "");
    c.format = o.value("format", "csv");
    if (c.format != "csv" && c.format != "json")
      throw ConfigError("output.format must be csv or json");
  }
  return c;
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (!c.data_path.empty()) {
    j["dataset"] = {{"path", c.data_path},
                    {"has_header", c.has_header},
                    {"time_column", c.time_column},
                    {"target", c.target}};
  }
  if (c.design) j["design"] = design_to_json(*c.design);
  if (!c.preset.empty()) j["preset"] = c.preset;
  if (!c.cell.empty()) j["cell"] = c.cell;
  if (c.command == "simulate") j["replication"] = c.replication;
  j["method"] = {{"screen", c.method},
                 {"band", c.band},
                 {"taper", c.taper},
                 {"standardize", c.standardize},
                 {"grid_size", c.grid_size}};
  if (c.gamma_n >= 0.0)
    j["selection"] = {{"threshold", c.gamma_n}};
  else
    j["selection"] = {{"top", c.d_n}};
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  if (c.command == "forecast") {
    json models = json::array();
    for (ForecastModel m : c.forecast.models) models.push_back(forecast_model_name(m));
    j["forecast"] = {{"horizon", c.forecast.horizon},
                     {"lags", c.forecast.lags},
                     {"predictor_lags", c.forecast.predictor_lags},
                     {"factors", c.forecast.factor_count},
                     {"window", c.forecast.window_length},
                     {"first_origin", c.forecast.first_origin},
                     {"step", c.forecast.step},
                     {"n_forecasts", c.forecast.n_forecasts},
                     {"models", models},
                     {"d_n", c.forecast.d_n}};
  }
  if (!c.depmeas.is_null()) j["depmeas"] = c.depmeas;
  j["output"] = {{"path", c.out_path}, {"format", c.format}};
  return j;
}

}  // namespace tss
