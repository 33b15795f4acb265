// tss: config-driven screening, selection and forecasting experiments.
//
// Exit codes: 0 success, 1 configuration/validation error, 2 runtime or
// numerical error. Structured warnings (zero-variance columns, covariance
// escalations, failed replications) go to stderr.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "tss/bench.hpp"
#include "tss/config.hpp"
#include "tss/covest.hpp"
#include "tss/dataset.hpp"
#include "tss/depmeas.hpp"
#include "tss/parallel.hpp"

namespace {

using nlohmann::json;
using namespace tss;

struct CellSpec {
  PresetDist dist;
  double gamma;
  double alpha;
  int p;
};

// Table grids; explicit cell values override the swept defaults, so
// off-grid smoke runs like p=60 stay possible.
std::vector<CellSpec> table_cells(const std::string& preset, const PresetCell& filter) {
  std::vector<std::pair<double, double>> pairs;  // (gamma, alpha)
  if (preset == "table1") {
    pairs = {{.4, .6}, {.5, .8}, {.6, .9}};
    if (filter.gamma && filter.alpha) pairs = {{*filter.gamma, *filter.alpha}};
    else if (filter.gamma || filter.alpha) {
      std::vector<std::pair<double, double>> kept;
      for (auto [g, a] : pairs)
        if ((filter.gamma && std::abs(*filter.gamma - g) < 1e-12) ||
            (filter.alpha && std::abs(*filter.alpha - a) < 1e-12))
          kept.push_back({g, a});
      pairs = kept;
    }
  } else if (preset == "table2" || preset == "table3" || preset == "table4" ||
             preset == "table5") {
    std::vector<double> alphas =
        (preset == "table4" || preset == "table5") ? std::vector<double>{.4, .5, .6}
                                                   : std::vector<double>{.4, .6, .8};
    if (filter.alpha) alphas = {*filter.alpha};
    for (double a : alphas) pairs.push_back({0.0, a});
  } else {
    throw ConfigError("unknown preset '" + preset + "'");
  }
  const std::vector<int> ps = filter.p ? std::vector<int>{*filter.p}
                                       : std::vector<int>{1000, 5000};
  std::vector<CellSpec> cells;
  for (PresetDist dist : {PresetDist::Gaussian, PresetDist::T5}) {
    if (filter.dist && *filter.dist != dist) continue;
    for (auto [g, a] : pairs)
      for (int p : ps) cells.push_back({dist, g, a, p});
  }
  if (cells.empty()) throw ConfigError("cell filter matches no cell of " + preset);
  return cells;
}

PresetCase preset_table_case(const std::string& preset) {
  if (preset == "table1") return PresetCase::C1;
  if (preset == "table2") return PresetCase::C2A;
  if (preset == "table3") return PresetCase::C2B;
  if (preset == "table4") return PresetCase::C3A;
  if (preset == "table5") return PresetCase::C3B;
  throw ConfigError("preset '" + preset + "' does not name a simulation table");
}

SimDesign design_from_config(const RunConfig& c) {
  if (c.design) {
    SimDesign d = *c.design;
    if (c.seed != 0) d.seed = c.seed;
    return d;
  }
  if (c.preset.empty()) throw ConfigError("give a design or a preset");
  const PresetCell cell = parse_cell(c.cell);
  PresetParams params;
  if (cell.gamma) params.gamma = *cell.gamma;
  if (cell.alpha) params.alpha = *cell.alpha;
  const PresetDist dist = cell.dist.value_or(PresetDist::Gaussian);
  const int p = cell.p.value_or(1000);
  std::string name = c.preset;
  if (name == "table1") name = "c1";
  else if (name == "table2") name = "c2a";
  else if (name == "table3") name = "c2b";
  else if (name == "table4") name = "c3a";
  else if (name == "table5") name = "c3b";
  return preset_design(preset_case_from_string(name), p, dist, params, c.seed);
}

void emit(const ExperimentReport& report, const RunConfig& c) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (c.out_path.empty()) {
    if (c.format == "json")
      write_report_json(report, std::cout);
    else
      write_report_csv(report, std::cout);
    return;
  }
  std::ofstream out(c.out_path);
  if (!out) throw std::runtime_error("cannot write '" + c.out_path + "'");
  if (c.format == "json")
    write_report_json(report, out);
  else
    write_report_csv(report, out);
}

int effective_jobs(const RunConfig& c) { return c.jobs > 0 ? c.jobs : default_jobs(); }

int run_simulate(const RunConfig& c) {
  const SimDesign design = design_from_config(c);
  const SimData data = generate(design, static_cast<std::uint64_t>(c.replication));
  TimeSeriesDataset out;
  out.values.resize(data.X.rows(), data.X.cols() + 1);
  out.values.leftCols(data.X.cols()) = data.X;
  out.values.col(data.X.cols()) = data.y;
  for (int j = 0; j < design.p; ++j) out.columns.push_back("x" + std::to_string(j + 1));
  out.columns.push_back("y");
  if (c.out_path.empty()) throw ConfigError("simulate needs an output path");
  write_csv(out, c.out_path);
  return 0;
}

ScreenOptions screen_options(const RunConfig& c, ScreenMethod method) {
  ScreenOptions o;
  o.method = method;
  o.band = c.band;
  o.taper = c.taper;
  o.standardize = c.standardize;
  o.jobs = effective_jobs(c);
  return o;
}

int run_screen_dataset(const RunConfig& c) {
  CsvSchema schema;
  schema.has_header = c.has_header;
  if (!c.time_column.empty()) schema.time_column = c.time_column;
  const TimeSeriesDataset data = ingest_csv(c.data_path, schema);
  if (c.target.empty()) throw ConfigError("screening a dataset needs a target column");
  const int yi = data.column_index(c.target);
  if (yi < 0) throw ConfigError("target column '" + c.target + "' not found");
  Eigen::MatrixXd X(data.rows(), data.cols() - 1);
  std::vector<std::string> names;
  Eigen::Index jj = 0;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (j == yi) continue;
    X.col(jj++) = data.values.col(j);
    names.push_back(data.columns[j]);
  }
  const Eigen::VectorXd y = data.values.col(yi);

  const ScreenMethod method = c.method == "sis" ? ScreenMethod::Sis : ScreenMethod::Glss;
  SelectionRule rule = c.gamma_n >= 0.0
                           ? SelectionRule::threshold(c.gamma_n)
                           : SelectionRule::top(c.d_n > 0 ? c.d_n
                                                          : std::min<int>(X.cols(),
                                                                          int(X.rows()) - 1));
  const ScreeningResult res = screen(X, y, screen_options(c, method), rule);

  ExperimentReport rep;
  rep.title = "screen: " + c.data_path;
  rep.metric = "marginal-scores";
  rep.seed = c.seed;
  rep.replications = 1;
  rep.config_json = run_config_to_json(c).dump();
  std::vector<int> rank_of(res.scores.size());
  for (std::size_t r = 0; r < res.ranking.size(); ++r) rank_of[res.ranking[r]] = int(r);
  for (Eigen::Index j = 0; j < res.scores.size(); ++j) {
    const bool sel =
        std::find(res.selected.begin(), res.selected.end(), int(j)) != res.selected.end();
    rep.rows.push_back({names[j],
                        c.method,
                        {{"score", res.scores[j]},
                         {"rank", double(rank_of[j] + 1)},
                         {"selected", sel ? 1.0 : 0.0}}});
  }
  for (const auto& w : res.warnings)
    rep.warnings.push_back("column " + names[w.column] + ": " + w.message);
  emit(rep, c);
  return 0;
}

int run_screen(const RunConfig& c, bool method_given) {
  if (!c.data_path.empty()) return run_screen_dataset(c);

  ExperimentReport merged;
  merged.metric = "coverage-proportion";
  merged.seed = c.seed;
  merged.replications = c.reps;
  merged.config_json = run_config_to_json(c).dump();
  const int jobs = effective_jobs(c);

  std::vector<ScreenMethod> methods;
  if (method_given)
    methods = {c.method == "sis" ? ScreenMethod::Sis : ScreenMethod::Glss};
  else
    methods = {ScreenMethod::Sis, ScreenMethod::Glss};

  if (!c.preset.empty() && c.preset.rfind("table", 0) == 0) {
    const PresetCase pc = preset_table_case(c.preset);
    merged.title = c.preset;
    for (const CellSpec& cell : table_cells(c.preset, parse_cell(c.cell))) {
      PresetParams params{cell.gamma, cell.alpha};
      const SimDesign design = preset_design(pc, cell.p, cell.dist, params, c.seed);
      const int d_n = c.d_n > 0 ? c.d_n : design.n - 1;
      for (ScreenMethod m : methods) {
        ScreenOptions o = screen_options(c, m);
        o.jobs = 1;
        const ExperimentReport r = run_screen_experiment(design, o, d_n, c.reps, jobs);
        merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
        merged.warnings.insert(merged.warnings.end(), r.warnings.begin(), r.warnings.end());
        merged.wall_time_sec += r.wall_time_sec;
      }
    }
  } else {
    const SimDesign design = design_from_config(c);
    merged.title = design.id;
    const int d_n = c.d_n > 0 ? c.d_n : design.n - 1;
    for (ScreenMethod m : methods) {
      ScreenOptions o = screen_options(c, m);
      o.jobs = 1;
      const ExperimentReport r = run_screen_experiment(design, o, d_n, c.reps, jobs);
      merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
      merged.warnings.insert(merged.warnings.end(), r.warnings.begin(), r.warnings.end());
      merged.wall_time_sec += r.wall_time_sec;
    }
  }
  emit(merged, c);
  return 0;
}

int run_twostage_dataset(const RunConfig& c) {
  CsvSchema schema;
  schema.has_header = c.has_header;
  if (!c.time_column.empty()) schema.time_column = c.time_column;
  const TimeSeriesDataset data = ingest_csv(c.data_path, schema);
  if (c.target.empty()) throw ConfigError("twostage on a dataset needs a target column");
  const int yi = data.column_index(c.target);
  if (yi < 0) throw ConfigError("target column '" + c.target + "' not found");
  Eigen::MatrixXd X(data.rows(), data.cols() - 1);
  std::vector<std::string> names;
  Eigen::Index jj = 0;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (j == yi) continue;
    X.col(jj++) = data.values.col(j);
    names.push_back(data.columns[j]);
  }
  const Eigen::VectorXd y = data.values.col(yi);

  TwoStageOptions opt;
  opt.first_stage = c.method == "sis"    ? FirstStage::Sis
                    : c.method == "none" ? FirstStage::None
                                         : FirstStage::Glss;
  opt.band = c.band;
  opt.taper = c.taper;
  opt.standardize = c.standardize;
  opt.d_n = c.d_n > 0 ? c.d_n : std::min<int>(int(X.cols()), int(X.rows()) - 1);
  opt.grid_size = c.grid_size;
  opt.jobs = effective_jobs(c);
  const TwoStageResult res = two_stage(X, y, opt);

  ExperimentReport rep;
  rep.title = "twostage: " + c.data_path;
  rep.metric = "selected-coefficients";
  rep.seed = c.seed;
  rep.replications = 1;
  rep.config_json = run_config_to_json(c).dump();
  rep.rows.push_back({"(intercept)", "", {{"coef", res.intercept}}});
  for (int j : res.selected_support)
    rep.rows.push_back({names[j], "", {{"coef", res.coefs[j]}}});
  for (const auto& w : res.warnings) {
    const std::string where = w.column >= 0 ? names[w.column] : std::string("(model)");
    rep.warnings.push_back(where + ": " + w.message);
  }
  if (res.empty_model) rep.warnings.push_back("empty model selected");
  emit(rep, c);
  return 0;
}

int run_twostage(const RunConfig& c, bool method_given) {
  if (!c.data_path.empty()) return run_twostage_dataset(c);

  ExperimentReport merged;
  merged.metric = "exact-support-proportion";
  merged.seed = c.seed;
  merged.replications = c.reps;
  merged.config_json = run_config_to_json(c).dump();
  const int jobs = effective_jobs(c);

  std::vector<FirstStage> stages;
  if (method_given)
    stages = {c.method == "sis"    ? FirstStage::Sis
              : c.method == "none" ? FirstStage::None
                                   : FirstStage::Glss};
  else
    stages = {FirstStage::Glss, FirstStage::None};

  auto run_cells = [&](const SimDesign& design) {
    const int d_n = c.d_n > 0 ? c.d_n : design.n - 1;
    for (FirstStage fs : stages) {
      TwoStageOptions opt;
      opt.first_stage = fs;
      opt.band = c.band;
      opt.taper = c.taper;
      opt.standardize = c.standardize;
      opt.d_n = d_n;
      opt.grid_size = c.grid_size;
      opt.jobs = 1;
      const ExperimentReport r = run_two_stage_experiment(design, opt, c.reps, jobs);
      merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
      merged.warnings.insert(merged.warnings.end(), r.warnings.begin(), r.warnings.end());
      merged.wall_time_sec += r.wall_time_sec;
    }
  };

  if (!c.preset.empty() && c.preset.rfind("table", 0) == 0) {
    const PresetCase pc = preset_table_case(c.preset);
    merged.title = c.preset;
    for (const CellSpec& cell : table_cells(c.preset, parse_cell(c.cell))) {
      PresetParams params{cell.gamma, cell.alpha};
      run_cells(preset_design(pc, cell.p, cell.dist, params, c.seed));
    }
  } else {
    const SimDesign design = design_from_config(c);
    merged.title = design.id;
    run_cells(design);
  }
  emit(merged, c);
  return 0;
}

int run_figure1(const RunConfig& c) {
  std::vector<double> grid;
  for (double r = 0.5; r < 0.951; r += 0.05) grid.push_back(r);
  ExperimentReport rep =
      gls_vs_ols_curve(grid, 200, c.reps, c.band, c.taper, c.seed, effective_jobs(c));
  rep.config_json = run_config_to_json(c).dump();
  emit(rep, c);
  return 0;
}

int run_forecast(const RunConfig& c) {
  if (c.data_path.empty())
    throw ConfigError(
        "forecast needs a dataset (the macroeconomic panel is user-supplied; see README)");
  CsvSchema schema;
  schema.has_header = c.has_header;
  if (!c.time_column.empty()) schema.time_column = c.time_column;
  const TimeSeriesDataset data = ingest_csv(c.data_path, schema);
  ForecastConfig fc = c.forecast;
  fc.target_column = c.target;
  fc.band = c.band;
  fc.taper = c.taper;
  fc.grid_size = c.grid_size;
  fc.jobs = effective_jobs(c);
  fc.seed = c.seed;
  if (fc.target_column.empty()) throw ConfigError("forecast needs a target column");
  if (fc.window_length <= 0) throw ConfigError("forecast needs a window length");
  ForecastRun run = rolling_forecast(data, fc);
  run.report.config_json = run_config_to_json(c).dump();
  emit(run.report, c);
  return 0;
}

int run_depmeas(const RunConfig& c) {
  const json& spec = c.depmeas;
  if (spec.is_null()) throw ConfigError("depmeas needs a 'depmeas' config section");
  if (!spec.is_object() || !spec.contains("kind"))
    throw ConfigError("depmeas config needs a 'kind'");
  const std::string kind = spec["kind"].get<std::string>();

  ExperimentReport rep;
  rep.seed = c.seed;
  rep.replications = 1;
  rep.config_json = run_config_to_json(c).dump();

  if (kind == "linear-fdm") {
    LinearProcessSpec lp;
    const json& coefs = spec.at("coefs");
    lp.coefs.resize(coefs.size());
    for (std::size_t i = 0; i < coefs.size(); ++i) lp.coefs[i] = coefs[i].get<double>();
    if (spec.contains("tail")) {
      const std::string tk = spec["tail"].at("kind").get<std::string>();
      if (tk == "geometric") lp.tail = TailKind::Geometric;
      else if (tk == "polynomial") lp.tail = TailKind::Polynomial;
      else if (tk == "none") lp.tail = TailKind::None;
      else throw ConfigError("unknown tail kind '" + tk + "'");
      lp.tail_param = spec["tail"].value("param", 0.0);
    }
    const double q = spec.value("q", 2.0);
    const int m_max = spec.value("m_max", 50);
    const DecayProfile prof = fdm_linear(lp, q, m_max, spec.value("mc_reps", 200000));
    rep.title = "cumulative dependence of a linear process";
    rep.metric = "decay-profile";
    for (int m = 0; m < prof.values.size(); ++m)
      rep.rows.push_back({"linear-fdm", "", {{"m", double(m)}, {"value", prof.values[m]}}});
    rep.rows.push_back({"linear-fdm",
                        "fit",
                        {{"fitted_exponent", prof.fitted_exponent},
                         {"fitted_rate", prof.fitted_rate}}});
  } else if (kind == "var1-decay") {
    Eigen::MatrixXd B1;
    const json& b = spec.at("b1");
    if (b.is_array()) {
      B1.resize(b.size(), b[0].size());
      for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b[i].size(); ++j) B1(i, j) = b[i][j].get<double>();
    } else {
      const int p = b.at("p").get<int>();
      B1 = b.at("value").get<double>() * Eigen::MatrixXd::Identity(p, p);
    }
    const int m_max = spec.value("m_max", 50);
    const DecayProfile prof = var1_phi_decay(B1, m_max);
    rep.title = "cumulative dependence of a VAR(1) process";
    rep.metric = "decay-profile";
    for (int m = 0; m < prof.values.size(); ++m)
      rep.rows.push_back({"var1-decay", "", {{"m", double(m)}, {"value", prof.values[m]}}});
    rep.rows.push_back({"var1-decay",
                        "fit",
                        {{"fitted_exponent", prof.fitted_exponent},
                         {"fitted_rate", prof.fitted_rate}}});
  } else if (kind == "asy-var") {
    const double se2 = spec.value("sigma_e2", 1.0);
    const double sn2 = spec.value("sigma_eta2", 1.0);
    std::vector<double> alphas, phis;
    for (const auto& a : spec.at("alpha")) alphas.push_back(a.get<double>());
    if (spec.contains("phi"))
      for (const auto& f : spec["phi"]) phis.push_back(f.get<double>());
    else
      phis.push_back(0.0);
    rep.title = "asymptotic variances of marginal estimates";
    rep.metric = "closed-form";
    const bool with_mc = spec.contains("mc");
    const int mc_n = with_mc ? spec["mc"].value("n", 2000) : 0;
    const int mc_reps = with_mc ? spec["mc"].value("reps", 5000) : 0;
    for (double phi : phis) {
      for (double a : alphas) {
        const AsyVar v = phi == 0.0 ? asy_var_case1(a, se2, sn2) : asy_var_case2(a, phi, se2, sn2);
        ReportRow row{"asy-var", phi == 0.0 ? "case1" : "case2",
                      {{"alpha", a}, {"phi", phi}, {"J", v.gls}, {"V", v.ols}}};
        if (with_mc) {
          const MarginalVariance mc = mc_marginal_variance(a, phi, mc_n, mc_reps, c.band,
                                                           c.taper, c.seed, effective_jobs(c));
          row.values.push_back({"mc_J", mc.gls});
          row.values.push_back({"mc_V", mc.ols});
        }
        rep.rows.push_back(std::move(row));
      }
    }
  } else {
    throw ConfigError("unknown depmeas kind '" + kind + "'");
  }
  emit(rep, c);
  return 0;
}

int dispatch(RunConfig& c, bool explain, bool method_given) {
  if (c.preset == "figure1" && c.command != "screen") c.command = "screen";  // curve preset
  if (explain) {
    std::cout << run_config_to_json(c).dump(2) << "\n";
    return 0;
  }
  if (c.command == "simulate") return run_simulate(c);
  if (c.command == "screen") {
    if (c.preset == "figure1") return run_figure1(c);
    return run_screen(c, method_given);
  }
  if (c.command == "twostage") return run_twostage(c, method_given);
  if (c.command == "forecast") return run_forecast(c);
  if (c.command == "depmeas") return run_depmeas(c);
  throw ConfigError("unknown command '" + c.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"screening, two-stage selection and forecasting for dependent data"};
  app.require_subcommand(1);

  std::string config_path, preset, cell, data_path, time_column, target, method, out_path,
      format;
  std::uint64_t seed = 0;
  int reps = 0, jobs = 0, band = -1, top = 0, grid = 0, replication = 0;
  double threshold = -1.0;
  bool explain = false, no_header = false, banded = false, raw = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--preset", preset,
                    "table1..table5, figure1, table6-format, or c1/c2a/c2b/c3a/c3b");
    sub->add_option("--cell", cell, "cell filter, e.g. gaussian,alpha=.4,p=1000");
    sub->add_option("--seed", seed, "root seed");
    sub->add_option("--reps", reps, "Monte-Carlo replications");
    sub->add_option("--jobs", jobs, "parallel workers (default: all cores)");
    sub->add_option("--out", out_path, "output path (default: stdout)");
    sub->add_option("--format", format, "csv or json");
    sub->add_flag("--explain", explain, "print the fully resolved config and exit");
    sub->add_option("--band", band, "GLSS band length l_n");
    sub->add_flag("--banded", banded, "use the plain banded covariance (no taper)");
    sub->add_flag("--no-standardize", raw, "score on centered but unstandardized columns");
    sub->add_option("--dn,--top", top, "screened set size d_n / top-d selection");
    sub->add_option("--grid", grid, "lambda grid size");
  };
  auto add_dataset = [&](CLI::App* sub) {
    sub->add_option("--data", data_path, "CSV dataset path");
    sub->add_flag("--no-header", no_header, "dataset has no header row");
    sub->add_option("--time-column", time_column, "time label column");
    sub->add_option("--target", target, "response / price-index column");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "write one simulated dataset as CSV");
  add_common(simulate);
  simulate->add_option("--rep", replication, "replication index to generate");

  CLI::App* screen_cmd = app.add_subcommand("screen", "marginal screening (SIS / GLSS)");
  add_common(screen_cmd);
  add_dataset(screen_cmd);
  screen_cmd->add_option("--method", method, "sis or glss");
  screen_cmd->add_option("--threshold", threshold, "selection threshold gamma_n");

  CLI::App* twostage = app.add_subcommand("twostage", "screen-then-adaptive-Lasso selection");
  add_common(twostage);
  add_dataset(twostage);
  twostage->add_option("--first-stage", method, "glss, sis or none");

  CLI::App* forecast = app.add_subcommand("forecast", "rolling-window direct forecasts");
  add_common(forecast);
  add_dataset(forecast);
  std::string models_csv;
  int window = 0, first_origin = -1, horizon = 0, factors = -1, lags = 0, step = 0,
      n_forecasts = 0;
  forecast->add_option("--models", models_csv, "comma-separated model list");
  forecast->add_option("--window", window, "training pairs per window");
  forecast->add_option("--first-origin", first_origin, "row index of the first origin");
  forecast->add_option("--horizon", horizon, "forecast horizon (months)");
  forecast->add_option("--factors", factors, "number of principal-component factors");
  forecast->add_option("--lags", lags, "autoregressive lag count");
  forecast->add_option("--step", step, "origin step");
  forecast->add_option("--n-forecasts", n_forecasts, "number of forecast origins");

  CLI::App* depmeas_cmd = app.add_subcommand("depmeas", "dependence-measure calculators");
  add_common(depmeas_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config '" + config_path + "'");
      json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded()) throw ConfigError("config '" + config_path + "' is not valid JSON");
      c = parse_run_config(j);
    }
    c.command = app.get_subcommands().front()->get_name();

    // explicit flags override the config file
    if (!preset.empty()) c.preset = preset;
    if (!cell.empty()) c.cell = cell;
    if (!data_path.empty()) c.data_path = data_path;
    if (no_header) c.has_header = false;
    if (!time_column.empty()) c.time_column = time_column;
    if (!target.empty()) c.target = target;
    bool method_given = !method.empty();
    if (method_given) c.method = method;
    else if (!c.method.empty() && !config_path.empty()) method_given = true;
    if (seed != 0) c.seed = seed;
    if (reps > 0) c.reps = reps;
    if (jobs > 0) c.jobs = jobs;
    if (band >= 0) c.band = band;
    if (banded) c.taper = false;
    if (raw) c.standardize = false;
    if (top > 0) c.d_n = top;
    if (threshold >= 0.0) c.gamma_n = threshold;
    if (grid > 1) c.grid_size = grid;
    if (!out_path.empty()) c.out_path = out_path;
    if (!format.empty()) c.format = format;
    c.replication = replication;
    if (c.command == "forecast") {
      if (!models_csv.empty()) {
        c.forecast.models.clear();
        std::size_t pos = 0;
        while (pos <= models_csv.size()) {
          std::size_t next = models_csv.find(',', pos);
          if (next == std::string::npos) next = models_csv.size();
          c.forecast.models.push_back(
              forecast_model_from_string(models_csv.substr(pos, next - pos)));
          pos = next + 1;
          if (next == models_csv.size()) break;
        }
      }
      if (window > 0) c.forecast.window_length = window;
      if (first_origin >= 0) c.forecast.first_origin = first_origin;
      if (horizon > 0) c.forecast.horizon = horizon;
      if (factors >= 0) c.forecast.factor_count = factors;
      if (lags > 0) c.forecast.lags = lags;
      if (step > 0) c.forecast.step = step;
      if (n_forecasts > 0) c.forecast.n_forecasts = n_forecasts;
      if (top > 0) c.forecast.d_n = top;
      if (c.preset == "table6-format") {
        // the eight-model menu with its defaults; data is user-supplied
        c.forecast.models.clear();
        c.forecast.horizon = 12;
        c.forecast.lags = 4;
        c.forecast.predictor_lags = 3;
        c.forecast.factor_count = 4;
        if (c.forecast.d_n == 0) c.forecast.d_n = 73;
      }
    }

    return dispatch(c, explain, method_given);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const CsvError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}
