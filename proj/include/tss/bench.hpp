#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tss/dataset.hpp"
#include "tss/dgp.hpp"
#include "tss/penreg.hpp"
#include "tss/screen.hpp"

namespace tss {

struct ReportRow {
  std::string design;
  std::string method;
  std::vector<std::pair<std::string, double>> values;
  double value(const std::string& key) const;  // throws if absent
};

/// One experiment's outcome: reproducible given (design, seed); proportions
/// carry their Monte-Carlo standard error sqrt(p(1-p)/reps).
struct ExperimentReport {
  std::string title;
  std::string metric;
  std::uint64_t seed = 0;
  int replications = 0;
  double wall_time_sec = 0.0;
  std::string config_json;  // resolved run configuration (audit trail)
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
};

void write_report_csv(const ExperimentReport& report, std::ostream& out);
void write_report_json(const ExperimentReport& report, std::ostream& out);

/// Proportion of replications whose top-d_n screened set contains the true
/// support. Failed replications count as non-coverage and are logged.
ExperimentReport run_screen_experiment(const SimDesign& design, const ScreenOptions& options,
                                       int d_n, int reps, int jobs = 1);

/// Proportion of replications where some lambda on the final adaptive-Lasso
/// path selects exactly the true support.
ExperimentReport run_two_stage_experiment(const SimDesign& design,
                                          const TwoStageOptions& options, int reps,
                                          int jobs = 1);

/// Mean absolute estimation error of marginal OLS and feasible marginal GLS
/// in the univariate model y = .5 x + eps, eps AR(1, rho), x iid standard
/// Gaussian; one row per rho with keys {rho, ols_mae, gls_mae}.
ExperimentReport gls_vs_ols_curve(const std::vector<double>& rho_grid, int n, int reps,
                                  int band = 15, bool taper = true, std::uint64_t seed = 0,
                                  int jobs = 1);

/// Monte-Carlo sampling variances of sqrt(n)(estimate - beta) for marginal
/// OLS and feasible marginal GLS; the covariate is iid when phi = 0 and
/// AR(1, phi) otherwise (unit innovation variances throughout).
struct MarginalVariance {
  double ols = 0.0;
  double gls = 0.0;
};
MarginalVariance mc_marginal_variance(double alpha, double phi, int n, int reps, int band = 15,
                                      bool taper = true, std::uint64_t seed = 0, int jobs = 1);

/// Inflation-style transforms of a positive price-index level series:
/// target[t] = 100 log(P_{t+horizon}/P_t) (realized at t+horizon, aligned to
/// the regressors at t) and lagged monthly rates 1200 log(P_t/P_{t-1}) back
/// to lag `lags`-1. origin[i] is the level-series index t of aligned row i.
struct InflationTarget {
  Eigen::VectorXd target;
  Eigen::MatrixXd lagged;  // columns: rate_t, rate_{t-1}, ..., rate_{t-lags+1}
  std::vector<int> origin;
};
InflationTarget build_inflation_target(const Eigen::VectorXd& levels, int horizon = 12,
                                       int lags = 4);

/// Principal-component scores of standardized columns: the leading k left
/// singular directions scaled by their singular values, with the
/// largest-magnitude loading of each component made positive.
Eigen::MatrixXd pca_factors(const Eigen::MatrixXd& X, int k);

enum class ForecastModel {
  Ar4,
  Ar4Factors,
  Lasso,
  AdaLasso,
  SisLasso,
  SisAdaLasso,
  GlssLasso,
  GlssAdaLasso,
};
std::string forecast_model_name(ForecastModel m);
ForecastModel forecast_model_from_string(const std::string& s);

struct ForecastConfig {
  std::string target_column;  // price-index levels, treated as I(1)
  int horizon = 12;
  int lags = 4;            // autoregressive lags y_t .. y_{t-lags+1}
  int predictor_lags = 3;  // extra lags of every predictor column
  int factor_count = 4;
  int window_length = 0;   // training pairs per window (must be set)
  int first_origin = -1;   // row index of the first forecast's regressors; -1 = earliest valid
  int step = 1;
  int n_forecasts = 0;     // 0 = as many as the data allows
  std::vector<ForecastModel> models;  // empty = all eight
  int d_n = 73;
  int band = 15;
  bool taper = true;
  int grid_size = 100;
  int jobs = 1;
  std::uint64_t seed = 0;  // recorded in the report (the pipeline is deterministic)
};

/// Rolling-window direct forecasts. Every regressor used at origin t is built
/// from data up to t only (factors are re-estimated inside each window);
/// metrics are MSE/MAE relative to the AR(4) benchmark over all origins.
struct ForecastRun {
  std::vector<int> origins;
  Eigen::VectorXd actual;
  std::map<ForecastModel, Eigen::VectorXd> forecasts;
  ExperimentReport report;
};
ForecastRun rolling_forecast(const TimeSeriesDataset& data, const ForecastConfig& config);

}  // namespace tss
