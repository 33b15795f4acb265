#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tss/screen.hpp"

namespace tss {

/// Coordinate-descent solution of
///   min_beta ||y - X beta||^2 + lambda * sum_j w_j |beta_j|.
/// Note the squared-error term carries no 1/2 or 1/n, so the KKT subgradient
/// bound is lambda * w_j / 2. A weight of +inf excludes the column.
struct CdResult {
  Eigen::VectorXd beta;
  bool converged = false;
  int sweeps = 0;
};

CdResult lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                  const Eigen::VectorXd& weights, double tol = 1e-9, int max_sweeps = 100000,
                  const Eigen::VectorXd* warm_start = nullptr);

/// Penalized objective value (testing / diagnostics).
double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda,
                       const Eigen::VectorXd& weights);

/// Largest normalized stationarity violation: inactive coordinates must have
/// |X_j'r| <= lambda w_j/2, active ones X_j'r = lambda w_j sign(beta_j)/2,
/// each scaled by ||X_j|| ||r|| + lambda w_j/2.
double lasso_kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& beta, double lambda,
                           const Eigen::VectorXd& weights);

struct LassoPath {
  Eigen::VectorXd lambdas;                    // decreasing grid
  std::vector<Eigen::VectorXd> coefs;         // per lambda
  std::vector<std::vector<int>> active_sets;  // ascending indices per lambda
  Eigen::VectorXd rss;                        // ||y - X beta||^2 per lambda
  Eigen::VectorXd weights;
  bool converged = true;

  int size() const { return static_cast<int>(lambdas.size()); }
};

/// Log-spaced grid from lambda_max = 2 max_j |X_j'y| / w_j down to
/// lambda_max * lambda_min_ratio, warm-started. A negative ratio picks the
/// default: 1e-3 when n < p, 1e-4 otherwise.
LassoPath lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& weights, int grid_size = 100,
                     double lambda_min_ratio = -1.0);

/// Weighted path with w_j = 1/|initial_j|; columns with initial_j = 0 are
/// excluded. Throws if every initial coefficient is zero.
LassoPath adaptive_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& initial, int grid_size = 100);

/// Modified BIC over a path:
///   MBIC(lambda) = log(RSS/n) + |A| (log n / n) log(log p) * penalty_scale,
/// with p the ambient dimension of the stage being tuned. Ties break toward
/// the larger lambda (sparser model).
struct MbicChoice {
  int index = 0;
  double value = 0.0;
};
MbicChoice mbic_select(const LassoPath& path, int n, int ambient_p,
                       double penalty_scale = 1.0);

/// Same criterion with RSS taken from the least-squares refit of each path
/// point's active set (candidate-model evaluation). Points with |A| >= n are
/// skipped. Shrinkage bias of the path solutions does not distort this
/// variant, so it selects markedly sharper supports.
MbicChoice mbic_select_refit(const LassoPath& path, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, int ambient_p,
                             double penalty_scale = 1.0);

enum class FirstStage { None, Sis, Glss };
enum class MbicVariant { PathRss, RefitLs };

struct TwoStageOptions {
  FirstStage first_stage = FirstStage::Glss;
  int band = 15;
  bool taper = true;
  bool standardize = true;
  int d_n = 0;  // screened set size; ignored when first_stage == None
  int grid_size = 100;
  MbicVariant initial_mbic = MbicVariant::RefitLs;  // lambda_I selection
  int jobs = 1;
};

/// Screen-then-adaptive-Lasso estimator. Stage one keeps the top d_n columns;
/// stage two fits a Lasso path on the submatrix (columns standardized
/// internally), picks the initial estimator by modified BIC, re-fits the
/// adaptive path with w_j = 1/|beta_init_j|, and re-embeds coefficients into
/// length p with zeros outside the screened set.
struct TwoStageResult {
  std::vector<int> screened;           // ascending stage-one survivors
  Eigen::VectorXd coefs;               // length p, original scale, MBIC-chosen
  double intercept = 0.0;
  std::vector<int> selected_support;   // nonzero indices of coefs
  std::vector<int> support_signs;      // sign per selected_support entry
  LassoPath path;                      // stage-two adaptive path, re-embedded
  bool empty_model = false;            // stage two excluded every column
  std::vector<ColumnNote> warnings;
};

TwoStageResult two_stage(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const TwoStageOptions& options);

/// True iff some path point's active set equals `support` exactly.
bool path_hits_support(const LassoPath& path, const std::vector<int>& support);

}  // namespace tss
