#include "tss/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "tss/covest.hpp"
#include "tss/parallel.hpp"

namespace tss {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double proportion_se(double p, int reps) { return std::sqrt(p * (1.0 - p) / reps); }

}  // namespace

double ReportRow::value(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  throw std::invalid_argument("report row has no value named '" + key + "'");
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  nlohmann::json meta;
  meta["title"] = report.title;
  meta["metric"] = report.metric;
  meta["seed"] = report.seed;
  meta["replications"] = report.replications;
  meta["wall_time_sec"] = report.wall_time_sec;
  if (!report.config_json.empty()) {
    auto parsed = nlohmann::json::parse(report.config_json, nullptr, false);
    meta["config"] = parsed.is_discarded() ? nlohmann::json(report.config_json) : parsed;
  }
  out << "# " << meta.dump() << "\n";

  // column order: first appearance across rows
  std::vector<std::string> keys;
  for (const auto& row : report.rows)
    for (const auto& [k, v] : row.values)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);

  out << "design,method";
  for (const auto& k : keys) out << "," << k;
  out << "\n";
  for (const auto& row : report.rows) {
    out << row.design << "," << row.method;
    for (const auto& k : keys) {
      out << ",";
      for (const auto& [rk, rv] : row.values)
        if (rk == k) {
          out << format_double(rv);
          break;
        }
    }
    out << "\n";
  }
}

void write_report_json(const ExperimentReport& report, std::ostream& out) {
  nlohmann::json j;
  j["title"] = report.title;
  j["metric"] = report.metric;
  j["seed"] = report.seed;
  j["replications"] = report.replications;
  j["wall_time_sec"] = report.wall_time_sec;
  if (!report.config_json.empty()) {
    auto parsed = nlohmann::json::parse(report.config_json, nullptr, false);
    j["config"] = parsed.is_discarded() ? nlohmann::json(report.config_json) : parsed;
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r;
    r["design"] = row.design;
    r["method"] = row.method;
    for (const auto& [k, v] : row.values) r["values"][k] = v;
    j["rows"].push_back(r);
  }
  j["warnings"] = report.warnings;
  out << j.dump(2) << "\n";
}

namespace {

std::string screen_label(const ScreenOptions& o) {
  if (o.method == ScreenMethod::Sis) return "sis";
  return "glss(l=" + std::to_string(o.band) + (o.taper ? ",taper)" : ",banded)");
}

std::string two_stage_label(const TwoStageOptions& o) {
  switch (o.first_stage) {
    case FirstStage::None:
      return "adalasso";
    case FirstStage::Sis:
      return "sis-adalasso(d=" + std::to_string(o.d_n) + ")";
    case FirstStage::Glss:
      return "glss-adalasso(d=" + std::to_string(o.d_n) + ")";
  }
  return "";
}

}  // namespace

ExperimentReport run_screen_experiment(const SimDesign& design, const ScreenOptions& options,
                                       int d_n, int reps, int jobs) {
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  const auto t0 = Clock::now();
  const std::vector<int> support = design.true_support();

  std::vector<char> covered(reps, 0);
  std::vector<std::string> failures(reps);
  ScreenOptions opts = options;
  opts.jobs = 1;  // parallelism lives at the replication level
  parallel_for(jobs, reps, [&](int r) {
    try {
      const SimData data = generate(design, r);
      const Eigen::VectorXd scores =
          opts.method == ScreenMethod::Sis
              ? sis_scores(data.X, data.y, opts.standardize)
              : glss_scores(data.X, data.y, opts.band, opts.taper, opts.standardize);
      covered[r] = coverage(select(scores, SelectionRule::top(d_n)), support) ? 1 : 0;
    } catch (const std::exception& e) {
      covered[r] = 0;  // failed replication counts against coverage
      failures[r] = e.what();
    }
  });

  double p = 0.0;
  for (char c : covered) p += c;
  p /= reps;

  ExperimentReport rep;
  rep.title = "screening coverage";
  rep.metric = "coverage-proportion";
  rep.seed = design.seed;
  rep.replications = reps;
  rep.rows.push_back({design.id, screen_label(options), {{"value", p},
                                                          {"mc_se", proportion_se(p, reps)},
                                                          {"d_n", double(d_n)}}});
  for (int r = 0; r < reps; ++r)
    if (!failures[r].empty())
      rep.warnings.push_back("replication " + std::to_string(r) + " failed: " + failures[r]);
  rep.wall_time_sec = seconds_since(t0);
  return rep;
}

ExperimentReport run_two_stage_experiment(const SimDesign& design,
                                          const TwoStageOptions& options, int reps, int jobs) {
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  const auto t0 = Clock::now();
  const std::vector<int> support = design.true_support();

  std::vector<char> hit(reps, 0);
  std::vector<std::string> failures(reps);
  TwoStageOptions opts = options;
  opts.jobs = 1;
  parallel_for(jobs, reps, [&](int r) {
    try {
      const SimData data = generate(design, r);
      const TwoStageResult fit = two_stage(data.X, data.y, opts);
      hit[r] = (!fit.empty_model && path_hits_support(fit.path, support)) ? 1 : 0;
    } catch (const std::exception& e) {
      hit[r] = 0;
      failures[r] = e.what();
    }
  });

  double p = 0.0;
  for (char c : hit) p += c;
  p /= reps;

  ExperimentReport rep;
  rep.title = "two-stage exact-support selection";
  rep.metric = "exact-support-proportion";
  rep.seed = design.seed;
  rep.replications = reps;
  rep.rows.push_back({design.id, two_stage_label(options), {{"value", p},
                                                             {"mc_se", proportion_se(p, reps)}}});
  for (int r = 0; r < reps; ++r)
    if (!failures[r].empty())
      rep.warnings.push_back("replication " + std::to_string(r) + " failed: " + failures[r]);
  rep.wall_time_sec = seconds_since(t0);
  return rep;
}

namespace {

// Feasible marginal GLS of y on a single covariate: marginal OLS residuals,
// tapered/banded autocovariance, then the GLS ratio through the banded
// factorization with the standard ridge escalation.
double marginal_gls(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int band, bool taper) {
  const int n = static_cast<int>(x.size());
  const double rho = x.dot(y) / x.squaredNorm();
  const Eigen::VectorXd resid = y - rho * x;
  const AutocovSeq acov = sample_autocov(resid, band);
  const BandedToeplitzCov cov(acov, band, n, taper);
  static constexpr double kRidges[] = {0.0, 1e-8, 1e-6};
  for (double ridge : kRidges) {
    try {
      const BandedCholesky fact(cov, ridge);
      const Eigen::VectorXd u = fact.solve(x);
      return u.dot(y) / u.dot(x);
    } catch (const FactorizationError&) {
    }
  }
  throw FactorizationError("marginal GLS covariance is singular");
}

// x iid (phi = 0) or AR(1, phi); errors AR(1, alpha); unit innovations.
void univariate_draw(Rng& rng, int n, double phi, double alpha, Eigen::VectorXd& x,
                     Eigen::VectorXd& eps) {
  constexpr int kBurn = 500;
  x.resize(n);
  if (phi == 0.0) {
    for (int t = 0; t < n; ++t) x[t] = rng.gaussian();
  } else {
    double cur = 0.0;
    for (int t = 0; t < kBurn + n; ++t) {
      cur = phi * cur + rng.gaussian();
      if (t >= kBurn) x[t - kBurn] = cur;
    }
  }
  eps.resize(n);
  double cur = 0.0;
  for (int t = 0; t < kBurn + n; ++t) {
    cur = alpha * cur + rng.gaussian();
    if (t >= kBurn) eps[t - kBurn] = cur;
  }
}

}  // namespace

ExperimentReport gls_vs_ols_curve(const std::vector<double>& rho_grid, int n, int reps,
                                  int band, bool taper, std::uint64_t seed, int jobs) {
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  for (double r : rho_grid)
    if (!(std::abs(r) < 1.0)) throw std::invalid_argument("rho grid must lie in (-1,1)");
  const auto t0 = Clock::now();
  constexpr double kBeta = 0.5;

  const int cells = static_cast<int>(rho_grid.size());
  std::vector<double> ols_err(static_cast<std::size_t>(cells) * reps);
  std::vector<double> gls_err(static_cast<std::size_t>(cells) * reps);
  parallel_for(jobs, cells * reps, [&](int idx) {
    const int i = idx / reps;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(idx)));
    Eigen::VectorXd x, eps;
    univariate_draw(rng, n, 0.0, rho_grid[i], x, eps);
    const Eigen::VectorXd y = kBeta * x + eps;
    const double ols = x.dot(y) / x.squaredNorm();
    const double gls = marginal_gls(x, y, band, taper);
    ols_err[idx] = std::abs(ols - kBeta);
    gls_err[idx] = std::abs(gls - kBeta);
  });

  ExperimentReport rep;
  rep.title = "gls vs ols marginal error";
  rep.metric = "mae-curve";
  rep.seed = seed;
  rep.replications = reps;
  for (int i = 0; i < cells; ++i) {
    double mo = 0.0, mg = 0.0;
    for (int r = 0; r < reps; ++r) {
      mo += ols_err[static_cast<std::size_t>(i) * reps + r];
      mg += gls_err[static_cast<std::size_t>(i) * reps + r];
    }
    rep.rows.push_back({"figure1", "",
                        {{"rho", rho_grid[i]}, {"ols_mae", mo / reps}, {"gls_mae", mg / reps}}});
  }
  rep.wall_time_sec = seconds_since(t0);
  return rep;
}

MarginalVariance mc_marginal_variance(double alpha, double phi, int n, int reps, int band,
                                      bool taper, std::uint64_t seed, int jobs) {
  if (reps < 2) throw std::invalid_argument("reps must be at least 2");
  constexpr double kBeta = 0.5;
  std::vector<double> ols(reps), gls(reps);
  parallel_for(jobs, reps, [&](int r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Eigen::VectorXd x, eps;
    univariate_draw(rng, n, phi, alpha, x, eps);
    const Eigen::VectorXd y = kBeta * x + eps;
    const double sq = std::sqrt(double(n));
    ols[r] = sq * (x.dot(y) / x.squaredNorm() - kBeta);
    gls[r] = sq * (marginal_gls(x, y, band, taper) - kBeta);
  });
  auto sample_var = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (double t : v) m += t;
    m /= v.size();
    double s = 0.0;
    for (double t : v) s += (t - m) * (t - m);
    return s / (v.size() - 1);
  };
  return {sample_var(ols), sample_var(gls)};
}

InflationTarget build_inflation_target(const Eigen::VectorXd& levels, int horizon, int lags) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (lags < 1) throw std::invalid_argument("lag count must be at least 1");
  const int T = static_cast<int>(levels.size());
  for (int t = 0; t < T; ++t)
    if (!(levels[t] > 0.0))
      throw std::invalid_argument("nonpositive level at index " + std::to_string(t));
  if (T <= horizon + lags)
    throw std::invalid_argument("series too short for the horizon and lag depth");

  // monthly rate, defined from t = 1
  Eigen::VectorXd rate(T);
  rate[0] = 0.0;
  for (int t = 1; t < T; ++t) rate[t] = 1200.0 * std::log(levels[t] / levels[t - 1]);

  InflationTarget out;
  const int first = lags;           // rate lags reach back to t - lags + 1 >= 1
  const int last = T - 1 - horizon;  // target realized inside the series
  const int rows = last - first + 1;
  out.target.resize(rows);
  out.lagged.resize(rows, lags);
  out.origin.resize(rows);
  for (int t = first; t <= last; ++t) {
    const int i = t - first;
    out.origin[i] = t;
    out.target[i] = 100.0 * std::log(levels[t + horizon] / levels[t]);
    for (int l = 0; l < lags; ++l) out.lagged(i, l) = rate[t - l];
  }
  return out;
}

Eigen::MatrixXd pca_factors(const Eigen::MatrixXd& X, int k) {
  const Eigen::Index n = X.rows(), m = X.cols();
  if (k < 1 || k > std::min(n, m))
    throw std::invalid_argument("factor count must lie in [1, min(n, m)]");
  Eigen::MatrixXd Z = X.rowwise() - X.colwise().mean();
  for (Eigen::Index j = 0; j < m; ++j) {
    const double var = Z.col(j).squaredNorm() / n;
    if (var > 1e-16 * std::max(1.0, X.col(j).squaredNorm() / n))
      Z.col(j) /= std::sqrt(var);
    else
      Z.col(j).setZero();  // constant column carries no variance direction
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd scores = svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal();
  // deterministic sign: the largest-magnitude loading of each component is positive
  for (int c = 0; c < k; ++c) {
    Eigen::Index imax = 0;
    svd.matrixV().col(c).cwiseAbs().maxCoeff(&imax);
    if (svd.matrixV()(imax, c) < 0.0) scores.col(c) = -scores.col(c);
  }
  return scores;
}

std::string forecast_model_name(ForecastModel m) {
  switch (m) {
    case ForecastModel::Ar4: return "ar4";
    case ForecastModel::Ar4Factors: return "ar4+factors";
    case ForecastModel::Lasso: return "lasso";
    case ForecastModel::AdaLasso: return "adalasso";
    case ForecastModel::SisLasso: return "sis-lasso";
    case ForecastModel::SisAdaLasso: return "sis-adalasso";
    case ForecastModel::GlssLasso: return "glss-lasso";
    case ForecastModel::GlssAdaLasso: return "glss-adalasso";
  }
  return "";
}

ForecastModel forecast_model_from_string(const std::string& s) {
  for (ForecastModel m : {ForecastModel::Ar4, ForecastModel::Ar4Factors, ForecastModel::Lasso,
                          ForecastModel::AdaLasso, ForecastModel::SisLasso,
                          ForecastModel::SisAdaLasso, ForecastModel::GlssLasso,
                          ForecastModel::GlssAdaLasso})
    if (forecast_model_name(m) == s) return m;
  throw std::invalid_argument("unknown forecast model '" + s + "'");
}

namespace {

struct PenalizedFit {
  Eigen::VectorXd coefs;
  double intercept = 0.0;
};

// Lasso path on internally standardized columns, tuned by modified BIC;
// coefficients returned on the original scale. A design with no usable
// penalized column yields the empty model.
PenalizedFit fit_lasso_mbic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int grid_size) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const Eigen::RowVectorXd mx = X.colwise().mean();
  const double my = y.mean();
  Eigen::MatrixXd Z = X.rowwise() - mx;
  const Eigen::VectorXd yc = y.array() - my;
  Eigen::VectorXd sd = Eigen::VectorXd::Ones(p);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(p);
  for (int j = 0; j < p; ++j) {
    const double var = Z.col(j).squaredNorm() / n;
    if (var <= 1e-16 * std::max(1.0, X.col(j).squaredNorm() / n)) {
      w[j] = std::numeric_limits<double>::infinity();
      Z.col(j).setZero();
    } else {
      sd[j] = std::sqrt(var);
      Z.col(j) /= sd[j];
    }
  }
  PenalizedFit fit;
  fit.coefs = Eigen::VectorXd::Zero(p);
  fit.intercept = my;
  try {
    const LassoPath path = lasso_path(Z, yc, w, grid_size);
    const MbicChoice choice = mbic_select(path, n, p);
    for (int j = 0; j < p; ++j) fit.coefs[j] = path.coefs[choice.index][j] / sd[j];
    fit.intercept = my - mx.dot(fit.coefs);
  } catch (const std::invalid_argument&) {
    // degenerate window: keep the empty model
  }
  return fit;
}

PenalizedFit fit_screened_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                ScreenMethod method, int d_n, int band, bool taper,
                                int grid_size) {
  ScreenOptions sopt;
  sopt.method = method;
  sopt.band = band;
  sopt.taper = taper;
  ScreeningResult sr = screen(X, y, sopt, SelectionRule::top(d_n));
  Eigen::MatrixXd Xs(X.rows(), sr.selected.size());
  for (std::size_t j = 0; j < sr.selected.size(); ++j) Xs.col(j) = X.col(sr.selected[j]);
  PenalizedFit sub = fit_lasso_mbic(Xs, y, grid_size);
  PenalizedFit fit;
  fit.coefs = Eigen::VectorXd::Zero(X.cols());
  for (std::size_t j = 0; j < sr.selected.size(); ++j) fit.coefs[sr.selected[j]] = sub.coefs[j];
  fit.intercept = sub.intercept;
  return fit;
}

PenalizedFit fit_two_stage(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           FirstStage first, int d_n, int band, bool taper, int grid_size) {
  TwoStageOptions opt;
  opt.first_stage = first;
  opt.d_n = d_n;
  opt.band = band;
  opt.taper = taper;
  opt.grid_size = grid_size;
  const TwoStageResult res = two_stage(X, y, opt);
  return {res.coefs, res.intercept};
}

}  // namespace

ForecastRun rolling_forecast(const TimeSeriesDataset& data, const ForecastConfig& config) {
  const auto t0 = Clock::now();
  const int T = static_cast<int>(data.rows());
  const int h = config.horizon;
  const int La = config.lags;
  const int Lp = config.predictor_lags;
  if (h < 1 || La < 1 || Lp < 0) throw std::invalid_argument("invalid horizon/lag configuration");
  if (config.window_length < La + config.factor_count + 2)
    throw std::invalid_argument("window length too short for the regression");
  const int target_idx = data.column_index(config.target_column);
  if (target_idx < 0)
    throw std::invalid_argument("target column '" + config.target_column + "' not found");

  for (Eigen::Index i = 0; i < data.values.rows(); ++i)
    for (Eigen::Index j = 0; j < data.values.cols(); ++j)
      if (!std::isfinite(data.values(i, j)))
        throw std::invalid_argument("missing value at row " + std::to_string(i) + ", column " +
                                    std::to_string(j));

  const Eigen::VectorXd levels = data.values.col(target_idx);
  for (int t = 0; t < T; ++t)
    if (!(levels[t] > 0.0))
      throw std::invalid_argument("nonpositive target level at row " + std::to_string(t));

  Eigen::VectorXd rate(T);
  rate[0] = 0.0;
  for (int t = 1; t < T; ++t) rate[t] = 1200.0 * std::log(levels[t] / levels[t - 1]);
  Eigen::VectorXd target12 = Eigen::VectorXd::Zero(T);
  for (int t = 0; t + h < T; ++t) target12[t] = 100.0 * std::log(levels[t + h] / levels[t]);

  std::vector<int> pred_cols;
  for (int j = 0; j < static_cast<int>(data.cols()); ++j)
    if (j != target_idx) pred_cols.push_back(j);
  const int m_p = static_cast<int>(pred_cols.size());

  std::vector<ForecastModel> models = config.models;
  if (models.empty())
    models = {ForecastModel::Ar4,      ForecastModel::Ar4Factors,  ForecastModel::Lasso,
              ForecastModel::AdaLasso, ForecastModel::SisLasso,    ForecastModel::SisAdaLasso,
              ForecastModel::GlssLasso, ForecastModel::GlssAdaLasso};
  const bool need_predictors =
      std::any_of(models.begin(), models.end(), [](ForecastModel m) { return m != ForecastModel::Ar4; });
  if (need_predictors && m_p == 0)
    throw std::invalid_argument("requested models need predictor columns");

  const int s_min = std::max(La, Lp);  // earliest origin with complete lags
  const int o_min = s_min + config.window_length + h - 1;
  const int o_max = T - 1 - h;
  const int o0 = config.first_origin < 0 ? o_min : config.first_origin;
  if (o0 < o_min)
    throw std::invalid_argument("first origin " + std::to_string(o0) +
                                " leaves no room for the training window (earliest is " +
                                std::to_string(o_min) + ")");
  if (o0 > o_max) throw std::invalid_argument("first origin beyond the last realizable target");
  const int avail = (o_max - o0) / config.step + 1;
  const int count = config.n_forecasts > 0 ? config.n_forecasts : avail;
  if (count > avail)
    throw std::invalid_argument("forecast targets would run past the end of the series");

  ForecastRun run;
  run.origins.resize(count);
  run.actual.resize(count);
  std::map<ForecastModel, Eigen::VectorXd> fcasts;
  for (ForecastModel m : models) fcasts[m] = Eigen::VectorXd::Zero(count);
  const bool have_ar4 = fcasts.count(ForecastModel::Ar4) > 0;
  if (!have_ar4) fcasts[ForecastModel::Ar4] = Eigen::VectorXd::Zero(count);  // benchmark

  const int W = config.window_length;
  parallel_for(config.jobs, count, [&](int k) {
    const int o = o0 + k * config.step;
    run.origins[k] = o;
    run.actual[k] = target12[o];  // realized at o + h, aligned to origin o

    const int s_lo = o - h - W + 1;  // training origins s_lo .. o-h
    // factors come from the window's predictor block plus its lags, rows up to o
    const int f_rows = o - s_lo + 1;
    Eigen::MatrixXd factors;
    if (config.factor_count > 0 && m_p > 0) {
      Eigen::MatrixXd F(f_rows, m_p * (Lp + 1));
      for (int r = 0; r < f_rows; ++r) {
        const int s = s_lo + r;
        int c = 0;
        for (int j : pred_cols)
          for (int l = 0; l <= Lp; ++l) F(r, c++) = data.values(s - l, j);
      }
      factors = pca_factors(F, std::min<int>(config.factor_count, std::min(F.rows(), F.cols())));
    }

    auto ar_row = [&](int s, Eigen::RowVectorXd& row, int offset) {
      for (int l = 0; l < La; ++l) row[offset + l] = rate[s - l];
    };
    const int xdim = La + m_p * (Lp + 1) + (factors.size() > 0 ? static_cast<int>(factors.cols()) : 0);
    auto x_row = [&](int s, Eigen::RowVectorXd& row) {
      ar_row(s, row, 0);
      int c = La;
      for (int j : pred_cols)
        for (int l = 0; l <= Lp; ++l) row[c++] = data.values(s - l, j);
      if (factors.size() > 0)
        for (int f = 0; f < factors.cols(); ++f) row[c++] = factors(s - s_lo, f);
    };

    Eigen::VectorXd tw(W);
    for (int i = 0; i < W; ++i) tw[i] = target12[s_lo + i];

    // AR(4) benchmark: target on intercept + lagged rates
    {
      Eigen::MatrixXd A(W, La + 1);
      Eigen::RowVectorXd row(La);
      for (int i = 0; i < W; ++i) {
        A(i, 0) = 1.0;
        ar_row(s_lo + i, row, 0);
        A.row(i).tail(La) = row;
      }
      const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(tw);
      Eigen::RowVectorXd xo(La);
      ar_row(o, xo, 0);
      fcasts[ForecastModel::Ar4][k] = coef[0] + xo.dot(coef.tail(La));
    }

    Eigen::MatrixXd Xw;
    Eigen::RowVectorXd xo;
    const bool need_xw = std::any_of(models.begin(), models.end(), [](ForecastModel m) {
      return m != ForecastModel::Ar4 && m != ForecastModel::Ar4Factors;
    });
    if (need_xw) {
      Xw.resize(W, xdim);
      Eigen::RowVectorXd row(xdim);
      for (int i = 0; i < W; ++i) {
        x_row(s_lo + i, row);
        Xw.row(i) = row;
      }
      xo.resize(xdim);
      x_row(o, xo);
    }

    for (ForecastModel m : models) {
      switch (m) {
        case ForecastModel::Ar4:
          break;  // already computed
        case ForecastModel::Ar4Factors: {
          const int fk = static_cast<int>(factors.cols());
          Eigen::MatrixXd A(W, La + fk + 1);
          Eigen::RowVectorXd row(La);
          for (int i = 0; i < W; ++i) {
            const int s = s_lo + i;
            A(i, 0) = 1.0;
            ar_row(s, row, 0);
            A.row(i).segment(1, La) = row;
            A.row(i).tail(fk) = factors.row(s - s_lo);
          }
          const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(tw);
          Eigen::RowVectorXd xa(La + fk);
          ar_row(o, xa, 0);
          xa.tail(fk) = factors.row(o - s_lo);
          fcasts[m][k] = coef[0] + xa.dot(coef.tail(La + fk));
          break;
        }
        case ForecastModel::Lasso: {
          const PenalizedFit fit = fit_lasso_mbic(Xw, tw, config.grid_size);
          fcasts[m][k] = fit.intercept + xo.dot(fit.coefs);
          break;
        }
        case ForecastModel::AdaLasso: {
          const PenalizedFit fit =
              fit_two_stage(Xw, tw, FirstStage::None, 0, config.band, config.taper,
                            config.grid_size);
          fcasts[m][k] = fit.intercept + xo.dot(fit.coefs);
          break;
        }
        case ForecastModel::SisLasso: {
          const PenalizedFit fit = fit_screened_lasso(Xw, tw, ScreenMethod::Sis, config.d_n,
                                                      config.band, config.taper, config.grid_size);
          fcasts[m][k] = fit.intercept + xo.dot(fit.coefs);
          break;
        }
        case ForecastModel::SisAdaLasso: {
          const PenalizedFit fit = fit_two_stage(Xw, tw, FirstStage::Sis, config.d_n, config.band,
                                                 config.taper, config.grid_size);
          fcasts[m][k] = fit.intercept + xo.dot(fit.coefs);
          break;
        }
        case ForecastModel::GlssLasso: {
          const PenalizedFit fit = fit_screened_lasso(Xw, tw, ScreenMethod::Glss, config.d_n,
                                                      config.band, config.taper, config.grid_size);
          fcasts[m][k] = fit.intercept + xo.dot(fit.coefs);
          break;
        }
        case ForecastModel::GlssAdaLasso: {
          const PenalizedFit fit = fit_two_stage(Xw, tw, FirstStage::Glss, config.d_n, config.band,
                                                 config.taper, config.grid_size);
          fcasts[m][k] = fit.intercept + xo.dot(fit.coefs);
          break;
        }
      }
    }
  });

  auto mse = [&](const Eigen::VectorXd& f) { return (f - run.actual).squaredNorm() / count; };
  auto mae = [&](const Eigen::VectorXd& f) { return (f - run.actual).cwiseAbs().mean(); };
  const double base_mse = mse(fcasts[ForecastModel::Ar4]);
  const double base_mae = mae(fcasts[ForecastModel::Ar4]);

  run.report.title = "rolling forecast: " + config.target_column;
  run.report.metric = "relative-mse/mae";
  run.report.seed = config.seed;
  run.report.replications = count;
  for (ForecastModel m : models) {
    const double m_mse = mse(fcasts[m]);
    const double m_mae = mae(fcasts[m]);
    run.report.rows.push_back({"forecast:" + config.target_column, forecast_model_name(m),
                               {{"rel_mse", m_mse / base_mse},
                                {"rel_mae", m_mae / base_mae},
                                {"mse", m_mse},
                                {"mae", m_mae}}});
  }
  for (ForecastModel m : models) run.forecasts[m] = fcasts[m];
  run.report.wall_time_sec = seconds_since(t0);
  return run;
}

}  // namespace tss
