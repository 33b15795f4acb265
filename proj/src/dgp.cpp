#include "tss/dgp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tss {

InnovationSpec scalar_innovation(InnovKind kind, double variance, int dof) {
  InnovationSpec s;
  s.kind = kind;
  s.dof = dof;
  if (variance == 1.0) {
    s.cov = InnovCov::Identity;
  } else {
    s.cov = InnovCov::Explicit;
    s.cov_matrix = Eigen::MatrixXd::Constant(1, 1, variance);
  }
  return s;
}

InnovationSampler::InnovationSampler(const InnovationSpec& spec, int p) : spec_(spec), p_(p) {
  if (p <= 0) throw std::invalid_argument("innovation dimension must be positive");
  if (spec_.kind == InnovKind::StudentT) {
    if (spec_.dof <= 2)
      throw std::invalid_argument("student-t dof must exceed 2 for the covariance to exist");
    t_scale_ = std::sqrt((spec_.dof - 2.0) / spec_.dof);
  }
  switch (spec_.cov) {
    case InnovCov::Identity:
      break;
    case InnovCov::ToeplitzRho:
      if (!(spec_.rho >= 0.0 && spec_.rho < 1.0))
        throw std::invalid_argument("toeplitz innovation correlation must lie in [0,1)");
      break;
    case InnovCov::Equicorrelated:
      if (!(spec_.rho >= 0.0 && spec_.rho < 1.0))
        throw std::invalid_argument("equicorrelated innovation correlation must lie in [0,1)");
      break;
    case InnovCov::Explicit: {
      if (spec_.cov_matrix.rows() != p || spec_.cov_matrix.cols() != p)
        throw std::invalid_argument("explicit innovation covariance has wrong dimension");
      Eigen::LLT<Eigen::MatrixXd> llt(spec_.cov_matrix);
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument("explicit innovation covariance is not positive definite");
      chol_ = llt.matrixL();
      break;
    }
  }
}

void InnovationSampler::draw(Rng& rng, Eigen::VectorXd& out) const {
  out.resize(p_);
  // Draw order is fixed (z block, then the equicorrelated common factor,
  // then the chi-squared mixing variable) so streams are reproducible.
  for (int j = 0; j < p_; ++j) out[j] = rng.gaussian();
  switch (spec_.cov) {
    case InnovCov::Identity:
      break;
    case InnovCov::ToeplitzRho: {
      // AR(1) across coordinates gives unit variances and corr rho^{|i-j|}.
      const double r = spec_.rho;
      const double s = std::sqrt(1.0 - r * r);
      for (int j = 1; j < p_; ++j) out[j] = r * out[j - 1] + s * out[j];
      break;
    }
    case InnovCov::Equicorrelated: {
      const double u = rng.gaussian();
      const double a = std::sqrt(1.0 - spec_.rho);
      const double b = std::sqrt(spec_.rho);
      for (int j = 0; j < p_; ++j) out[j] = a * out[j] + b * u;
      break;
    }
    case InnovCov::Explicit:
      out = chol_.triangularView<Eigen::Lower>() * out;
      break;
  }
  if (spec_.kind == InnovKind::StudentT) {
    const double w = rng.chi_squared(spec_.dof);
    out *= t_scale_ / std::sqrt(w / spec_.dof);
  }
}

Eigen::VectorXd InnovationSampler::draw(Rng& rng) const {
  Eigen::VectorXd out;
  draw(rng, out);
  return out;
}

namespace {

// |lambda|_max of a symmetric operator by power iteration with a fixed
// pseudo-random start, accurate to well below the stability margin we need.
template <typename Apply>
double symmetric_spectral_radius(int p, Apply&& apply) {
  Rng rng(0x5EED5EEDULL);
  Eigen::VectorXd v(p);
  for (int i = 0; i < p; ++i) v[i] = rng.gaussian();
  v.normalize();
  Eigen::VectorXd w(p);
  double lambda = 0.0;
  for (int it = 0; it < 300; ++it) {
    apply(v, w);
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return lambda;
}

}  // namespace

VarCoefOp::VarCoefOp(const VarCoefSpec& spec) : spec_(spec) {
  if (spec_.p <= 0) throw std::invalid_argument("VAR coefficient dimension must be positive");
  switch (spec_.kind) {
    case CoefKind::Diag:
      sprad_ = std::abs(spec_.value);
      break;
    case CoefKind::PowerToeplitz: {
      const double a = std::abs(spec_.value);
      if (a >= 1.0) throw std::invalid_argument("power-toeplitz base must satisfy |base| < 1");
      if (a == 0.0) {
        band_ = 0;
        band_coef_ = Eigen::VectorXd::Zero(1);
        sprad_ = 0.0;
        break;
      }
      // entries base^{|i-j|+1} fall below double precision beyond this band
      band_ = std::min<int>(spec_.p - 1,
                            static_cast<int>(std::ceil(std::log(1e-18) / std::log(a))));
      band_coef_.resize(band_ + 1);
      for (int d = 0; d <= band_; ++d) band_coef_[d] = std::pow(spec_.value, d + 1);
      sprad_ = symmetric_spectral_radius(
          spec_.p, [this](const Eigen::VectorXd& x, Eigen::VectorXd& out) { apply(x, out); });
      break;
    }
    case CoefKind::Explicit: {
      if (spec_.matrix.rows() != spec_.p || spec_.matrix.cols() != spec_.p)
        throw std::invalid_argument("explicit VAR coefficient matrix has wrong dimension");
      Eigen::EigenSolver<Eigen::MatrixXd> es(spec_.matrix, /*computeEigenvectors=*/false);
      sprad_ = es.eigenvalues().cwiseAbs().maxCoeff();
      break;
    }
  }
  if (sprad_ >= 1.0 - 1e-12)
    throw std::invalid_argument("unstable VAR coefficient matrix: spectral radius " +
                                std::to_string(sprad_) + " >= 1");
}

void VarCoefOp::apply(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
  const int p = spec_.p;
  out.resize(p);
  switch (spec_.kind) {
    case CoefKind::Diag:
      out = spec_.value * x;
      break;
    case CoefKind::PowerToeplitz: {
      for (int i = 0; i < p; ++i) {
        double s = band_coef_[0] * x[i];
        const int lo = std::max(0, i - band_);
        const int hi = std::min(p - 1, i + band_);
        for (int j = lo; j < i; ++j) s += band_coef_[i - j] * x[j];
        for (int j = i + 1; j <= hi; ++j) s += band_coef_[j - i] * x[j];
        out[i] = s;
      }
      break;
    }
    case CoefKind::Explicit:
      out = spec_.matrix * x;
      break;
  }
}

Eigen::MatrixXd gen_var1(const VarCoefSpec& coef, const InnovationSpec& innov, int n,
                         int burn_in, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("sample size must be positive");
  if (burn_in < 0) throw std::invalid_argument("burn-in must be nonnegative");
  VarCoefOp op(coef);
  InnovationSampler sampler(innov, coef.p);
  const int p = coef.p;

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p), ax(p), eta(p);
  for (int t = 0; t < burn_in + n; ++t) {
    op.apply(x, ax);
    sampler.draw(rng, eta);
    x = ax + eta;
    if (t >= burn_in) X.row(t - burn_in) = x;
  }
  return X;
}

Eigen::MatrixXd gen_var1(const VarCoefSpec& coef, const InnovationSpec& innov, int n,
                         int burn_in, std::uint64_t seed) {
  Rng rng(seed);
  return gen_var1(coef, innov, n, burn_in, rng);
}

Eigen::VectorXd gen_ar_error(const ArErrorSpec& spec, int n, int burn_in, Rng& rng) {
  if (!(std::abs(spec.alpha) < 1.0))
    throw std::invalid_argument("AR(1) error coefficient must satisfy |alpha| < 1");
  if (n <= 0) throw std::invalid_argument("sample size must be positive");
  if (burn_in < 0) throw std::invalid_argument("burn-in must be nonnegative");
  InnovationSampler sampler(spec.innovation, 1);
  Eigen::VectorXd eps(n), e(1);
  double cur = 0.0;
  for (int t = 0; t < burn_in + n; ++t) {
    sampler.draw(rng, e);
    cur = spec.alpha * cur + e[0];
    if (t >= burn_in) eps[t - burn_in] = cur;
  }
  return eps;
}

Eigen::VectorXd gen_ar_error(const ArErrorSpec& spec, int n, int burn_in, std::uint64_t seed) {
  Rng rng(seed);
  return gen_ar_error(spec, n, burn_in, rng);
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                             const Eigen::VectorXd& eps) {
  if (X.cols() != beta.size())
    throw std::invalid_argument("coefficient length does not match column count");
  if (X.rows() != eps.size())
    throw std::invalid_argument("error length does not match row count");
  return X * beta + eps;
}

std::vector<int> SimDesign::true_support() const {
  std::vector<int> s;
  for (int j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) s.push_back(j);
  return s;
}

SimData generate(const SimDesign& design, std::uint64_t replication) {
  if (design.beta.size() != design.p)
    throw std::invalid_argument("design beta length does not match p");
  Rng x_rng(derive_seed(design.seed, 2 * replication));
  Rng e_rng(derive_seed(design.seed, 2 * replication + 1));
  SimData data;
  data.X = gen_var1(design.coef, design.innov, design.n, design.burn_in, x_rng);
  data.eps = gen_ar_error(design.errors, design.n, design.burn_in, e_rng);
  data.y = gen_response(data.X, design.beta, data.eps);
  return data;
}

namespace {

Eigen::VectorXd leading_beta(int p, std::initializer_list<double> head) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  int i = 0;
  for (double v : head) beta[i++] = v;
  return beta;
}

// Scalar AR(1) error innovations: standard normal, or an unscaled t_dof
// (variance dof/(dof-2)) in the heavy-tailed scenarios.
InnovationSpec error_innovation(PresetDist dist) {
  if (dist == PresetDist::Gaussian) return scalar_innovation(InnovKind::Gaussian, 1.0);
  return scalar_innovation(InnovKind::StudentT, 5.0 / 3.0, 5);
}

}  // namespace

SimDesign preset_design(PresetCase c, int p, PresetDist dist, const PresetParams& params,
                        std::uint64_t seed) {
  if (p < 6) throw std::invalid_argument("preset designs need p >= 6");
  SimDesign d;
  d.n = 200;
  d.p = p;
  d.burn_in = 500;
  d.seed = seed;
  d.innov.kind = dist == PresetDist::T5 ? InnovKind::StudentT : InnovKind::Gaussian;
  d.innov.dof = 5;
  d.errors.alpha = params.alpha;
  d.errors.innovation = error_innovation(dist);
  d.coef.p = p;

  std::ostringstream id;
  switch (c) {
    case PresetCase::C1:
      d.coef.kind = CoefKind::Diag;
      d.coef.value = params.gamma;
      d.innov.cov = InnovCov::Identity;
      d.beta = leading_beta(p, {.5, .5, .5, .5, .5, .5});
      id << "c1;gamma=" << params.gamma;
      break;
    case PresetCase::C2A:
      d.coef.kind = CoefKind::Diag;
      d.coef.value = 0.4;
      d.innov.cov = InnovCov::ToeplitzRho;
      d.innov.rho = 0.3;
      d.beta = leading_beta(p, {1, -1, 1, -1, 1, -1});
      id << "c2a";
      break;
    case PresetCase::C2B:
      d.coef.kind = CoefKind::PowerToeplitz;
      d.coef.value = 0.4;
      d.innov.cov = InnovCov::Identity;
      d.beta = leading_beta(p, {1, -1, 1, -1, 1, -1});
      id << "c2b";
      break;
    case PresetCase::C3A:
      d.coef.kind = CoefKind::Diag;
      d.coef.value = 0.4;
      d.innov.cov = InnovCov::ToeplitzRho;
      d.innov.rho = 0.8;
      d.beta = leading_beta(p, {.5, .5, .5, .5, .5, .5});
      id << "c3a";
      break;
    case PresetCase::C3B:
      d.coef.kind = CoefKind::PowerToeplitz;
      d.coef.value = 0.4;
      d.innov.cov = InnovCov::Equicorrelated;
      d.innov.rho = 0.8;
      d.beta = leading_beta(p, {.75, .75, .75, .75, .75, .75});
      id << "c3b";
      break;
  }
  id << ";" << (dist == PresetDist::T5 ? "t5" : "gaussian") << ";alpha=" << params.alpha
     << ";p=" << p;
  d.id = id.str();
  return d;
}

PresetCase preset_case_from_string(const std::string& s) {
  if (s == "c1") return PresetCase::C1;
  if (s == "c2a") return PresetCase::C2A;
  if (s == "c2b") return PresetCase::C2B;
  if (s == "c3a") return PresetCase::C3A;
  if (s == "c3b") return PresetCase::C3B;
  throw std::invalid_argument("unknown preset case '" + s + "'");
}

}  // namespace tss
