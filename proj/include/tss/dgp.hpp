#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tss/rng.hpp"

namespace tss {

enum class InnovKind { Gaussian, StudentT };
enum class InnovCov { Identity, ToeplitzRho, Equicorrelated, Explicit };

/// Innovation distribution for VAR covariates or scalar AR errors.
///
/// The covariance descriptor always states the *target* covariance Sigma_eta
/// of the draws. Student-t vectors are sampled as the scale mixture
/// Z / sqrt(W/dof) with Z ~ N(0, V), W ~ chi^2_dof and V = ((dof-2)/dof) *
/// Sigma_eta, so the realized covariance (dof/(dof-2)) * V equals the target.
struct InnovationSpec {
  InnovKind kind = InnovKind::Gaussian;
  int dof = 5;  // StudentT only; must be > 2 for the covariance to exist
  InnovCov cov = InnovCov::Identity;
  double rho = 0.0;             // ToeplitzRho entries rho^{|i-j|}; Equicorrelated off-diagonals
  Eigen::MatrixXd cov_matrix;   // Explicit target covariance
};

/// Scalar innovation with target variance `variance`.
InnovationSpec scalar_innovation(InnovKind kind, double variance, int dof = 5);

/// Draws innovation vectors with the target covariance; the Cholesky factor
/// of an explicit covariance is computed once and reused across draws.
class InnovationSampler {
 public:
  InnovationSampler(const InnovationSpec& spec, int p);
  void draw(Rng& rng, Eigen::VectorXd& out) const;
  Eigen::VectorXd draw(Rng& rng) const;
  int dim() const { return p_; }
  const InnovationSpec& spec() const { return spec_; }

 private:
  InnovationSpec spec_;
  int p_ = 0;
  Eigen::MatrixXd chol_;   // lower factor of the target covariance (Explicit only)
  double t_scale_ = 1.0;   // sqrt((dof-2)/dof) for StudentT, 1 otherwise
};

enum class CoefKind { Diag, PowerToeplitz, Explicit };

/// VAR(1) coefficient matrix A_1. PowerToeplitz has entries base^{|i-j|+1}.
struct VarCoefSpec {
  CoefKind kind = CoefKind::Diag;
  double value = 0.0;        // gamma for Diag, base for PowerToeplitz
  Eigen::MatrixXd matrix;    // Explicit
  int p = 0;
};

/// Validated applier of x -> A_1 x. Stability (spectral radius < 1) is
/// checked at construction; PowerToeplitz multiplies through an effective
/// band beyond which entries are below double precision.
class VarCoefOp {
 public:
  explicit VarCoefOp(const VarCoefSpec& spec);
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& out) const;
  double spectral_radius() const { return sprad_; }
  int dim() const { return spec_.p; }
  const VarCoefSpec& spec() const { return spec_; }

 private:
  VarCoefSpec spec_;
  int band_ = 0;
  Eigen::VectorXd band_coef_;  // value^{d+1}, d = 0..band_
  double sprad_ = 0.0;
};

/// AR(1) error process eps_i = alpha * eps_{i-1} + e_i.
struct ArErrorSpec {
  double alpha = 0.0;  // |alpha| < 1
  InnovationSpec innovation = scalar_innovation(InnovKind::Gaussian, 1.0);
};

/// Full recipe for one Monte-Carlo scenario. Identical (design, seed) pairs
/// reproduce identical datasets bit-for-bit.
struct SimDesign {
  std::string id;
  int n = 200;
  int p = 0;
  Eigen::VectorXd beta;            // length p, s_n nonzeros
  VarCoefSpec coef;
  InnovationSpec innov;
  ArErrorSpec errors;
  int burn_in = 500;
  std::uint64_t seed = 0;

  std::vector<int> true_support() const;
};

struct SimData {
  Eigen::MatrixXd X;
  Eigen::VectorXd eps;
  Eigen::VectorXd y;
};

/// Simulates x_t = A_1 x_{t-1} + eta_t from the zero vector, discarding
/// `burn_in` initial steps; returns rows x_1..x_n.
Eigen::MatrixXd gen_var1(const VarCoefSpec& coef, const InnovationSpec& innov, int n,
                         int burn_in, Rng& rng);
Eigen::MatrixXd gen_var1(const VarCoefSpec& coef, const InnovationSpec& innov, int n,
                         int burn_in, std::uint64_t seed);

/// Simulates the AR(1) error recursion after burn-in.
Eigen::VectorXd gen_ar_error(const ArErrorSpec& spec, int n, int burn_in, Rng& rng);
Eigen::VectorXd gen_ar_error(const ArErrorSpec& spec, int n, int burn_in, std::uint64_t seed);

/// y = X beta + eps, dimensions checked.
Eigen::VectorXd gen_response(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                             const Eigen::VectorXd& eps);

/// Generates one replication. Covariate and error streams are derived from
/// design.seed and the replication index by a counter-based split
/// (derive_seed), so replications are independent and order-insensitive.
SimData generate(const SimDesign& design, std::uint64_t replication);

enum class PresetCase { C1, C2A, C2B, C3A, C3B };
enum class PresetDist { Gaussian, T5 };

struct PresetParams {
  double gamma = 0.4;  // C1 only: A_1 = diag(gamma)
  double alpha = 0.6;  // error AR(1) coefficient
};

/// Named simulation scenarios with their coefficient patterns, covariate
/// processes and error processes; n = 200, s_n = 6, burn_in = 500.
SimDesign preset_design(PresetCase c, int p, PresetDist dist, const PresetParams& params,
                        std::uint64_t seed = 0);

PresetCase preset_case_from_string(const std::string& s);

}  // namespace tss
