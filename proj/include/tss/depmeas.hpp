#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tss/dgp.hpp"

namespace tss {

/// ||e_0 - e_0*||_q for a scalar innovation: the q-norm of the difference of
/// two independent copies. Gaussian innovations use the closed form; student-t
/// is estimated over mc_reps independent pairs. Throws when the q-th moment
/// does not exist (q >= dof for student-t).
double innovation_qnorm(const InnovationSpec& spec, double q, int mc_reps = 200000,
                        std::uint64_t seed = 1);

enum class TailKind { None, Geometric, Polynomial };

/// Causal linear process eps_i = sum_j f_j e_{i-j} described by explicit
/// leading coefficients plus a declared tail: geometric f_j = f_K r^{j-K} or
/// polynomial f_j = f_K (j/K)^{-beta} beyond the truncation K.
struct LinearProcessSpec {
  Eigen::VectorXd coefs;  // f_0..f_K
  TailKind tail = TailKind::None;
  double tail_param = 0.0;  // Geometric: ratio in (0,1); Polynomial: beta > 1
  InnovationSpec innovation = scalar_innovation(InnovKind::Gaussian, 1.0);
};

/// Cumulative dependence values on m = 0..M with tail-decay fits.
struct DecayProfile {
  Eigen::VectorXd values;
  /// power-law exponent alpha from log-log regression over the last decade
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  /// geometric rate from log-linear regression over the last decade
  double fitted_rate = std::numeric_limits<double>::quiet_NaN();
};

/// Cumulative functional dependence measure of the linear process:
/// delta_q(eps_i) = |f_i| ||e_0 - e_0*||_q and values[m] = sum_{i>=m} delta_q,
/// with the declared tail summed analytically.
DecayProfile fdm_linear(const LinearProcessSpec& spec, double q, int m_max,
                        int mc_reps = 200000);

/// Cumulative dependence profile of a stable VAR(1): values[m] =
/// sum_{i>=m} ||B1^i||_2. For a VAR(k), pass companion_matrix(...) first.
DecayProfile var1_phi_decay(const Eigen::MatrixXd& B1, int m_max);

/// Stacks VAR(k) coefficient blocks into the kp x kp companion form
/// [[B_1 ... B_k], [I 0 ... 0], ..., [0 ... I 0]].
Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& coefs);

/// Asymptotic variances of sqrt(n)(estimate - truth) for the univariate
/// marginal model y_t = beta x_t + eps_t with AR(1) errors (coefficient
/// alpha, innovation variance sigma_e2).
struct AsyVar {
  double gls = 0.0;  // J
  double ols = 0.0;  // V
};

/// iid covariate with variance sigma_x2:
///   J = sigma_e2 / (sigma_x2 (1+alpha^2)),  V = sigma_e2 / (sigma_x2 (1-alpha^2)).
AsyVar asy_var_case1(double alpha, double sigma_e2, double sigma_x2);

/// AR(1) covariate x_t = phi x_{t-1} + eta_t (innovation variance sigma_eta2):
///   J = (1-phi^2) sigma_e2 / ((1+alpha^2-2 phi alpha) sigma_eta2)
///   V = (1-phi^2)(1+phi alpha) sigma_e2 / ((1-phi alpha)(1-alpha^2) sigma_eta2).
/// V is the OLS long-run variance sum_h gamma_x(h) gamma_eps(h) / var(x)^2 in
/// closed form; the Monte-Carlo harness in bench cross-checks both entries.
AsyVar asy_var_case2(double alpha, double phi, double sigma_e2, double sigma_eta2);

/// Display-only upper bounds on (J, V) for the dependent-covariate case,
/// evaluated for Gaussian innovations. Not exact values: excluded from the
/// Monte-Carlo cross-checks.
AsyVar asy_var_case3_bounds(double alpha, double phi, double sigma_e2, double sigma_eta2);

}  // namespace tss
