#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace tss {

enum class ScreenMethod { Sis, Glss };

struct ScreenOptions {
  ScreenMethod method = ScreenMethod::Glss;
  int band = 15;            // GLSS band length l_n
  bool taper = true;        // tapered (Bartlett) covariance; false = plain banded
  bool standardize = true;  // unit-sample-variance columns (centering always happens)
  int jobs = 1;
};

/// Per-column diagnostic (zero-variance columns, covariance escalations, ...).
struct ColumnNote {
  int column = -1;
  std::string message;
};

/// Selection rule: keep |score| >= gamma_n, or the top d_n by magnitude.
struct SelectionRule {
  enum class Kind { Threshold, Top } kind = Kind::Top;
  double gamma_n = 0.0;
  int d_n = 0;
  static SelectionRule threshold(double g) { return {Kind::Threshold, g, 0}; }
  static SelectionRule top(int d) { return {Kind::Top, 0.0, d}; }
};

struct ScreeningResult {
  Eigen::VectorXd scores;
  std::vector<int> ranking;   // by decreasing |score|, ties broken by smaller index
  std::vector<int> selected;  // ascending index order
  ScreenMethod method = ScreenMethod::Sis;
  int band = 0;
  bool taper = false;
  bool standardize = true;
  std::vector<ColumnNote> warnings;
};

/// Marginal OLS scores: rho_j = (X_j'X_j)^{-1} X_j'y on centered (and, when
/// standardize is set, unit-variance) columns and centered y. Zero-variance
/// columns score 0 and are reported in `warnings` rather than failing.
Eigen::VectorXd sis_scores(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           bool standardize = true, std::vector<ColumnNote>* warnings = nullptr);

/// Marginal GLS scores. Per column: marginal OLS residuals, tapered/banded
/// autocovariance with band l_n, then beta_k = (X_k'S^{-1}X_k)^{-1} X_k'S^{-1}y
/// through the banded factorization. Factorization failures escalate the
/// ridge through {0, 1e-8, 1e-6}; columns that still fail score 0 with a
/// warning. Cost O(p n l_n^2); columns run in parallel when jobs > 1.
Eigen::VectorXd glss_scores(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int band,
                            bool taper = true, bool standardize = true,
                            std::vector<ColumnNote>* warnings = nullptr, int jobs = 1);

/// Indices 0..p-1 ordered by decreasing |score|, ties toward smaller index.
std::vector<int> rank_by_magnitude(const Eigen::VectorXd& scores);

/// Applies the rule; results are in ascending index order.
std::vector<int> select(const Eigen::VectorXd& scores, const SelectionRule& rule);

/// True iff true_support is contained in selected.
bool coverage(const std::vector<int>& selected, const std::vector<int>& true_support);

/// Scores + ranking + selection in one pass.
ScreeningResult screen(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const ScreenOptions& options, const SelectionRule& rule);

}  // namespace tss
