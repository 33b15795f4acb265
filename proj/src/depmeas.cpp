#include "tss/depmeas.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace tss {

namespace {

double scalar_variance(const InnovationSpec& spec) {
  switch (spec.cov) {
    case InnovCov::Identity:
      return 1.0;
    case InnovCov::Explicit:
      if (spec.cov_matrix.rows() != 1 || spec.cov_matrix.cols() != 1)
        throw std::invalid_argument("scalar innovation needs a 1x1 covariance");
      return spec.cov_matrix(0, 0);
    default:
      throw std::invalid_argument("scalar innovation needs an identity or explicit covariance");
  }
}

// Least-squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

// Tail-decay fits over the last decade of m (m in [m_max/10, m_max]).
void fit_tail(DecayProfile& prof) {
  const int m_max = static_cast<int>(prof.values.size()) - 1;
  const int lo = std::max(1, m_max / 10);
  std::vector<double> lm, m_lin, lv;
  for (int m = lo; m <= m_max; ++m) {
    if (prof.values[m] > 0.0) {
      lm.push_back(std::log(double(m)));
      m_lin.push_back(double(m));
      lv.push_back(std::log(prof.values[m]));
    }
  }
  prof.fitted_exponent = -fit_slope(lm, lv);
  const double slope = fit_slope(m_lin, lv);
  prof.fitted_rate = std::isnan(slope) ? slope : std::exp(slope);
}

// sum_{j>=J} j^{-beta}, beta > 1: explicit partial sum plus an integral
// remainder at the midpoint, accurate far beyond the fit tolerances here.
double poly_tail_sum(double J, double beta) {
  double s = 0.0;
  const int chunk = 20000;
  double j = J;
  for (int i = 0; i < chunk; ++i, j += 1.0) s += std::pow(j, -beta);
  s += std::pow(j - 0.5, 1.0 - beta) / (beta - 1.0);
  return s;
}

}  // namespace

double innovation_qnorm(const InnovationSpec& spec, double q, int mc_reps, std::uint64_t seed) {
  if (q < 1.0) throw std::invalid_argument("q must be at least 1");
  const double var = scalar_variance(spec);
  if (spec.kind == InnovKind::Gaussian) {
    // e_0 - e_0* ~ N(0, 2 var); E|Z|^q = tau^q 2^{q/2} Gamma((q+1)/2)/sqrt(pi)
    const double tau2 = 2.0 * var;
    const double log_moment = 0.5 * q * std::log(tau2) + 0.5 * q * std::log(2.0) +
                              std::lgamma(0.5 * (q + 1.0)) - 0.5 * std::log(M_PI);
    return std::exp(log_moment / q);
  }
  if (q >= spec.dof)
    throw std::invalid_argument("moment does not exist: q >= dof for student-t innovations");
  if (mc_reps < 1000) throw std::invalid_argument("mc_reps too small");
  InnovationSampler sampler(spec, 1);
  Rng rng(derive_seed(seed, 0xD39Aull));
  Eigen::VectorXd a(1), b(1);
  double acc = 0.0;
  for (int r = 0; r < mc_reps; ++r) {
    sampler.draw(rng, a);
    sampler.draw(rng, b);
    acc += std::pow(std::abs(a[0] - b[0]), q);
  }
  return std::pow(acc / mc_reps, 1.0 / q);
}

DecayProfile fdm_linear(const LinearProcessSpec& spec, double q, int m_max, int mc_reps) {
  if (m_max < 1) throw std::invalid_argument("m_max must be at least 1");
  const int K = static_cast<int>(spec.coefs.size()) - 1;
  if (K < 0) throw std::invalid_argument("linear process needs at least one coefficient");
  if (spec.tail == TailKind::Geometric &&
      !(spec.tail_param > 0.0 && spec.tail_param < 1.0))
    throw std::invalid_argument("geometric tail ratio must lie in (0,1)");
  if (spec.tail == TailKind::Polynomial && !(spec.tail_param > 1.0))
    throw std::invalid_argument("polynomial tail exponent must exceed 1");
  if (spec.tail == TailKind::Polynomial && K < 1)
    throw std::invalid_argument("polynomial tail needs the truncation K >= 1");

  const double qn = innovation_qnorm(spec.innovation, q, mc_reps);
  const double fK = std::abs(spec.coefs[K]);

  // suffix sums of |f_i| qn over the explicit range, tail summed analytically
  DecayProfile prof;
  prof.values = Eigen::VectorXd::Zero(m_max + 1);
  auto tail_from = [&](int J) -> double {  // sum_{j >= J, j > K} |f_j|, J > K
    if (fK == 0.0) return 0.0;
    switch (spec.tail) {
      case TailKind::None:
        return 0.0;
      case TailKind::Geometric: {
        const double r = spec.tail_param;
        return fK * std::pow(r, double(J - K)) / (1.0 - r);
      }
      case TailKind::Polynomial: {
        const double beta = spec.tail_param;
        return fK * std::pow(double(K), beta) * poly_tail_sum(double(J), beta);
      }
    }
    return 0.0;
  };

  // beyond the truncation the suffix is the analytic tail alone
  for (int m = m_max; m > K; --m) prof.values[m] = qn * tail_from(m);

  // within the explicit range, accumulate coefficients onto the full tail
  double acc = tail_from(K + 1);
  for (int m = K; m >= 0; --m) {
    acc += std::abs(spec.coefs[m]);
    if (m <= m_max) prof.values[m] = qn * acc;
  }
  fit_tail(prof);
  return prof;
}

DecayProfile var1_phi_decay(const Eigen::MatrixXd& B1, int m_max) {
  if (B1.rows() != B1.cols()) throw std::invalid_argument("coefficient matrix must be square");
  if (m_max < 1) throw std::invalid_argument("m_max must be at least 1");
  const int p = static_cast<int>(B1.rows());
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(B1, /*computeEigenvectors=*/false);
    const double sprad = es.eigenvalues().cwiseAbs().maxCoeff();
    if (sprad >= 1.0 - 1e-12)
      throw std::invalid_argument("unstable VAR(1): spectral radius " + std::to_string(sprad));
  }

  auto spectral_norm = [&](const Eigen::MatrixXd& M) {
    Rng rng(0xB10Cull);
    Eigen::VectorXd v(p);
    for (int i = 0; i < p; ++i) v[i] = rng.gaussian();
    v.normalize();
    double s = 0.0;
    for (int it = 0; it < 100; ++it) {
      Eigen::VectorXd w = M.transpose() * (M * v);
      s = w.norm();
      if (s == 0.0) return 0.0;
      v = w / s;
    }
    return std::sqrt(s);
  };

  // norms of powers until they vanish relative to the head, then a geometric
  // remainder from the tail ratio
  std::vector<double> norms;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(p, p);
  norms.push_back(1.0);
  const int hard_cap = std::max(m_max + 1, 100000);
  for (int i = 1; i <= hard_cap; ++i) {
    M = M * B1;
    const double s = spectral_norm(M);
    norms.push_back(s);
    if (i > m_max && s < 1e-14) break;
  }
  double remainder = 0.0;
  const double last = norms.back();
  if (norms.size() >= 2 && last > 0.0) {
    const double r = last / norms[norms.size() - 2];
    if (r > 0.0 && r < 1.0) remainder = last * r / (1.0 - r);
  }

  DecayProfile prof;
  prof.values = Eigen::VectorXd::Zero(m_max + 1);
  double suffix = remainder;
  for (int i = static_cast<int>(norms.size()) - 1; i >= 0; --i) {
    suffix += norms[i];
    if (i <= m_max) prof.values[i] = suffix;
  }
  fit_tail(prof);
  return prof;
}

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& coefs) {
  if (coefs.empty()) throw std::invalid_argument("companion form needs at least one block");
  const Eigen::Index p = coefs.front().rows();
  for (const auto& B : coefs)
    if (B.rows() != p || B.cols() != p)
      throw std::invalid_argument("companion blocks must be square with equal dimensions");
  const Eigen::Index k = static_cast<Eigen::Index>(coefs.size());
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(k * p, k * p);
  for (Eigen::Index b = 0; b < k; ++b) comp.block(0, b * p, p, p) = coefs[b];
  for (Eigen::Index b = 1; b < k; ++b)
    comp.block(b * p, (b - 1) * p, p, p) = Eigen::MatrixXd::Identity(p, p);
  return comp;
}

AsyVar asy_var_case1(double alpha, double sigma_e2, double sigma_x2) {
  if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("|alpha| must be below 1");
  if (!(sigma_e2 > 0.0 && sigma_x2 > 0.0))
    throw std::invalid_argument("variances must be positive");
  AsyVar v;
  v.gls = sigma_e2 / (sigma_x2 * (1.0 + alpha * alpha));
  v.ols = sigma_e2 / (sigma_x2 * (1.0 - alpha * alpha));
  return v;
}

AsyVar asy_var_case2(double alpha, double phi, double sigma_e2, double sigma_eta2) {
  if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("|alpha| must be below 1");
  if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("|phi| must be below 1");
  if (!(sigma_e2 > 0.0 && sigma_eta2 > 0.0))
    throw std::invalid_argument("variances must be positive");
  AsyVar v;
  v.gls = (1.0 - phi * phi) * sigma_e2 / ((1.0 + alpha * alpha - 2.0 * phi * alpha) * sigma_eta2);
  v.ols = (1.0 - phi * phi) * (1.0 + phi * alpha) * sigma_e2 /
          ((1.0 - phi * alpha) * (1.0 - alpha * alpha) * sigma_eta2);
  return v;
}

AsyVar asy_var_case3_bounds(double alpha, double phi, double sigma_e2, double sigma_eta2) {
  if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("|alpha| must be below 1");
  if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("|phi| must be below 1");
  if (!(sigma_e2 > 0.0 && sigma_eta2 > 0.0))
    throw std::invalid_argument("variances must be positive");
  auto gauss4 = [](double var) { return std::pow(3.0 * var * var, 0.25); };  // ||N(0,var)||_4
  const double e4 = gauss4(sigma_e2);
  const double eta4 = gauss4(sigma_eta2);
  const double var_x = sigma_eta2 / (1.0 - phi * phi);
  const double x4 = gauss4(var_x);
  const double var_eps = sigma_e2 / (1.0 - alpha * alpha);
  const double eps4 = gauss4(var_eps);
  const double var_xt = sigma_eta2 + (phi - alpha) * (phi - alpha) * var_x;
  const double eta_diff4 = gauss4(2.0 * sigma_eta2);  // ||eta_0 - eta_0*||_4

  AsyVar b;
  const double j_root = 2.0 * e4 * eta4 * std::abs(phi - alpha) / ((1.0 - std::abs(phi)) * var_xt) +
                        2.0 * e4 * eta4 / var_xt;
  b.gls = j_root * j_root;
  const double delta04 = eta_diff4 / (1.0 - std::abs(phi));
  const double v_root =
      eps4 * delta04 / var_x + 2.0 * x4 * e4 / ((1.0 - std::abs(alpha)) * var_x);
  b.ols = v_root * v_root;
  return b;
}

}  // namespace tss
