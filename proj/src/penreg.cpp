#include "tss/penreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace tss {

namespace {

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda,
                       const Eigen::VectorXd& weights) {
  double pen = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) pen += weights[j] * std::abs(beta[j]);
  return (y - X * beta).squaredNorm() + lambda * pen;
}

namespace {

double kkt_violation_impl(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                          const Eigen::VectorXd& col_norms, const Eigen::VectorXd& beta,
                          double lambda, const Eigen::VectorXd& weights) {
  const double rnorm = r.norm();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (!std::isfinite(weights[j])) continue;  // excluded column
    const double g = X.col(j).dot(r);
    const double bound = 0.5 * lambda * weights[j];
    const double viol = beta[j] == 0.0 ? std::max(0.0, std::abs(g) - bound)
                                       : std::abs(g - bound * (beta[j] > 0 ? 1.0 : -1.0));
    const double scale = col_norms[j] * rnorm + bound;
    worst = std::max(worst, viol / std::max(scale, 1e-300));
  }
  return worst;
}

}  // namespace

double lasso_kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& beta, double lambda,
                           const Eigen::VectorXd& weights) {
  Eigen::VectorXd col_norms(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) col_norms[j] = X.col(j).norm();
  return kkt_violation_impl(X, y - X * beta, col_norms, beta, lambda, weights);
}

CdResult lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                  const Eigen::VectorXd& weights, double tol, int max_sweeps,
                  const Eigen::VectorXd* warm_start) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (y.size() != n) throw std::invalid_argument("response length does not match row count");
  if (weights.size() != p) throw std::invalid_argument("weight length does not match p");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  for (Eigen::Index j = 0; j < p; ++j)
    if (!(weights[j] >= 0.0)) throw std::invalid_argument("weights must be nonnegative");

  Eigen::VectorXd sxx(p);
  for (Eigen::Index j = 0; j < p; ++j) sxx[j] = X.col(j).squaredNorm();
  const Eigen::VectorXd col_norms = sxx.cwiseSqrt();

  CdResult res;
  res.beta = warm_start ? *warm_start : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = y - X * res.beta;

  auto update = [&](Eigen::Index j) {
    const double old = res.beta[j];
    const double c = X.col(j).dot(r) + sxx[j] * old;
    const double next = soft_threshold(c, 0.5 * lambda * weights[j]) / sxx[j];
    if (next != old) {
      r.noalias() -= (next - old) * X.col(j);
      res.beta[j] = next;
      return std::abs(next - old);
    }
    return 0.0;
  };

  // full sweeps admit new coordinates; in between, iterate the active set only
  std::vector<Eigen::Index> active;
  const double kkt_tol = std::max(10.0 * tol, 1e-9);
  bool full_pass = true;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_change = 0.0;
    if (full_pass) {
      active.clear();
      for (Eigen::Index j = 0; j < p; ++j) {
        if (!std::isfinite(weights[j]) || sxx[j] <= 0.0) continue;
        max_change = std::max(max_change, update(j));
        if (res.beta[j] != 0.0) active.push_back(j);
      }
    } else {
      for (Eigen::Index j : active) max_change = std::max(max_change, update(j));
    }
    res.sweeps = sweep;
    if (max_change > tol) {
      full_pass = false;
      continue;
    }
    if (!full_pass) {
      full_pass = true;  // active set settled; confirm with a full sweep
      continue;
    }
    // refresh the residual to kill accumulated drift, then certify
    r.noalias() = y - X * res.beta;
    if (kkt_violation_impl(X, r, col_norms, res.beta, lambda, weights) <= kkt_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

LassoPath lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& weights, int grid_size, double lambda_min_ratio) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (grid_size < 2) throw std::invalid_argument("grid size must be at least 2");
  if (weights.size() != p) throw std::invalid_argument("weight length does not match p");
  if (lambda_min_ratio < 0.0) lambda_min_ratio = n < p ? 1e-3 : 1e-4;
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0))
    throw std::invalid_argument("lambda_min_ratio must lie in (0,1)");

  double lambda_max = 0.0;
  bool any_admissible = false;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!std::isfinite(weights[j])) continue;
    any_admissible = true;
    if (weights[j] > 0.0)
      lambda_max = std::max(lambda_max, 2.0 * std::abs(X.col(j).dot(y)) / weights[j]);
  }
  if (!any_admissible) throw std::invalid_argument("no admissible columns");
  if (lambda_max <= 0.0)
    throw std::invalid_argument("degenerate problem: all penalized marginal correlations are 0");
  lambda_max *= 1.0 + 1e-12;  // keep the first grid point strictly inactive

  LassoPath path;
  path.weights = weights;
  path.lambdas.resize(grid_size);
  const double log_max = std::log(lambda_max);
  const double log_step = std::log(lambda_min_ratio) / (grid_size - 1);
  for (int i = 0; i < grid_size; ++i) path.lambdas[i] = std::exp(log_max + log_step * i);

  path.rss.resize(grid_size);
  path.coefs.reserve(grid_size);
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < grid_size; ++i) {
    CdResult fit = lasso_cd(X, y, path.lambdas[i], weights, 1e-8, 2000, &warm);
    warm = fit.beta;
    path.converged = path.converged && fit.converged;
    path.rss[i] = (y - X * fit.beta).squaredNorm();
    std::vector<int> active;
    for (Eigen::Index j = 0; j < p; ++j)
      if (fit.beta[j] != 0.0) active.push_back(static_cast<int>(j));
    path.active_sets.push_back(std::move(active));
    path.coefs.push_back(std::move(fit.beta));
  }
  return path;
}

LassoPath adaptive_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& initial, int grid_size) {
  if (initial.size() != X.cols())
    throw std::invalid_argument("initial estimate length does not match p");
  if (!initial.allFinite()) throw std::invalid_argument("initial estimate must be finite");
  Eigen::VectorXd w(initial.size());
  bool any = false;
  for (Eigen::Index j = 0; j < initial.size(); ++j) {
    if (initial[j] == 0.0) {
      w[j] = kInf;  // excluded
    } else {
      w[j] = 1.0 / std::abs(initial[j]);
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("all initial coefficients are zero; no admissible columns");
  return lasso_path(X, y, w, grid_size);
}

MbicChoice mbic_select(const LassoPath& path, int n, int ambient_p, double penalty_scale) {
  if (path.size() == 0) throw std::invalid_argument("empty path");
  const double factor =
      penalty_scale * (std::log(double(n)) / n) * std::log(std::log(double(ambient_p)));
  MbicChoice best;
  best.value = kInf;
  for (int i = 0; i < path.size(); ++i) {
    const double rss = std::max(path.rss[i], 1e-300);
    const double crit = std::log(rss / n) + double(path.active_sets[i].size()) * factor;
    if (crit < best.value) {  // strict: ties keep the larger lambda
      best.value = crit;
      best.index = i;
    }
  }
  return best;
}

MbicChoice mbic_select_refit(const LassoPath& path, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, int ambient_p, double penalty_scale) {
  if (path.size() == 0) throw std::invalid_argument("empty path");
  const int n = static_cast<int>(X.rows());
  const double factor =
      penalty_scale * (std::log(double(n)) / n) * std::log(std::log(double(ambient_p)));

  std::map<std::vector<int>, double> rss_cache;
  auto refit_rss = [&](const std::vector<int>& active) {
    if (auto it = rss_cache.find(active); it != rss_cache.end()) return it->second;
    double rss;
    if (active.empty()) {
      rss = y.squaredNorm();
    } else {
      Eigen::MatrixXd Xa(n, active.size());
      for (std::size_t k = 0; k < active.size(); ++k) Xa.col(k) = X.col(active[k]);
      rss = (y - Xa * Xa.colPivHouseholderQr().solve(y)).squaredNorm();
    }
    rss_cache.emplace(active, rss);
    return rss;
  };

  MbicChoice best;
  best.index = -1;
  best.value = kInf;
  for (int i = 0; i < path.size(); ++i) {
    if (static_cast<int>(path.active_sets[i].size()) >= n) continue;  // refit undefined
    const double rss = std::max(refit_rss(path.active_sets[i]), 1e-300);
    const double crit =
        std::log(rss / n) + double(path.active_sets[i].size()) * factor;
    if (crit < best.value) {
      best.value = crit;
      best.index = i;
    }
  }
  if (best.index < 0) throw std::invalid_argument("no path point admits a least-squares refit");
  return best;
}

bool path_hits_support(const LassoPath& path, const std::vector<int>& support) {
  std::vector<int> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& active : path.active_sets)
    if (active == sorted) return true;
  return false;
}

TwoStageResult two_stage(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const TwoStageOptions& options) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  TwoStageResult res;

  if (options.first_stage == FirstStage::None || options.d_n >= p) {
    res.screened.resize(p);
    for (int j = 0; j < p; ++j) res.screened[j] = j;
  } else {
    if (options.d_n < 1 || options.d_n > std::min(n - 1, p))
      throw std::invalid_argument("d_n must lie in [1, min(n-1, p)]");
    ScreenOptions sopt;
    sopt.method = options.first_stage == FirstStage::Sis ? ScreenMethod::Sis : ScreenMethod::Glss;
    sopt.band = options.band;
    sopt.taper = options.taper;
    sopt.standardize = options.standardize;
    sopt.jobs = options.jobs;
    ScreeningResult sr = screen(X, y, sopt, SelectionRule::top(options.d_n));
    res.screened = sr.selected;
    res.warnings = std::move(sr.warnings);
  }

  const int d = static_cast<int>(res.screened.size());
  Eigen::MatrixXd Xs(n, d);
  for (int j = 0; j < d; ++j) Xs.col(j) = X.col(res.screened[j]);

  // center, then standardize columns internally; coefficients and weights are
  // reported on the original scale
  const Eigen::RowVectorXd mx = Xs.colwise().mean();
  const double my = y.mean();
  Eigen::MatrixXd Z = Xs.rowwise() - mx;
  const Eigen::VectorXd yc = y.array() - my;
  Eigen::VectorXd sd(d);
  Eigen::VectorXd unit_w = Eigen::VectorXd::Ones(d);
  for (int j = 0; j < d; ++j) {
    const double var = Z.col(j).squaredNorm() / n;
    if (var <= 1e-16 * std::max(1.0, Xs.col(j).squaredNorm() / n)) {
      sd[j] = 1.0;
      unit_w[j] = kInf;  // degenerate column: exclude from stage two
      res.warnings.push_back({res.screened[j], "zero-variance column excluded from stage two"});
    } else {
      sd[j] = std::sqrt(var);
      Z.col(j) /= sd[j];
    }
  }

  auto embed = [&](const Eigen::VectorXd& b_std) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < d; ++j) full[res.screened[j]] = b_std[j] / sd[j];
    return full;
  };
  auto embed_path = [&](LassoPath path_sub) {
    LassoPath out;
    out.lambdas = path_sub.lambdas;
    out.rss = path_sub.rss;
    out.converged = path_sub.converged;
    out.weights = Eigen::VectorXd::Constant(p, kInf);
    for (int j = 0; j < d; ++j) out.weights[res.screened[j]] = path_sub.weights[j];
    for (int i = 0; i < path_sub.size(); ++i) {
      out.coefs.push_back(embed(path_sub.coefs[i]));
      std::vector<int> active;
      for (int j : path_sub.active_sets[i]) active.push_back(res.screened[j]);
      out.active_sets.push_back(std::move(active));
    }
    return out;
  };

  LassoPath initial_path;
  try {
    initial_path = lasso_path(Z, yc, unit_w, options.grid_size);
  } catch (const std::invalid_argument&) {
    res.coefs = Eigen::VectorXd::Zero(p);
    res.intercept = my;
    res.empty_model = true;
    res.warnings.push_back({-1, "stage two excluded every column; empty model returned"});
    return res;
  }
  const MbicChoice init = options.initial_mbic == MbicVariant::RefitLs
                              ? mbic_select_refit(initial_path, Z, yc, d)
                              : mbic_select(initial_path, n, d);
  const Eigen::VectorXd& init_std = initial_path.coefs[init.index];

  if (init_std.isZero(0.0)) {
    res.coefs = Eigen::VectorXd::Zero(p);
    res.intercept = my;
    res.path = embed_path(std::move(initial_path));
    res.empty_model = true;
    res.warnings.push_back({-1, "initial estimator selected the empty model"});
    return res;
  }

  LassoPath adaptive_sub = adaptive_lasso(Z, yc, init_std, options.grid_size);
  const MbicChoice final_choice = options.initial_mbic == MbicVariant::RefitLs
                                      ? mbic_select_refit(adaptive_sub, Z, yc, d)
                                      : mbic_select(adaptive_sub, n, d);
  const Eigen::VectorXd chosen = embed(adaptive_sub.coefs[final_choice.index]);
  res.path = embed_path(std::move(adaptive_sub));
  res.coefs = chosen;
  res.intercept = my;
  for (int j = 0; j < d; ++j) res.intercept -= mx[j] * chosen[res.screened[j]];
  for (int j = 0; j < p; ++j) {
    if (res.coefs[j] != 0.0) {
      res.selected_support.push_back(j);
      res.support_signs.push_back(res.coefs[j] > 0 ? 1 : -1);
    }
  }
  return res;
}

}  // namespace tss
