#include "tss/covest.hpp"

#include <cmath>

namespace tss {

AutocovSeq sample_autocov(const Eigen::VectorXd& resid, int max_lag) {
  const int n = static_cast<int>(resid.size());
  if (max_lag < 0) throw std::invalid_argument("max_lag must be nonnegative");
  if (max_lag >= n) throw std::invalid_argument("max_lag must be smaller than the sample size");
  if (!resid.allFinite()) throw std::invalid_argument("residuals must be finite");

  AutocovSeq out;
  out.n = n;
  out.gamma.resize(max_lag + 1);
  for (int r = 0; r <= max_lag; ++r) {
    double s = 0.0;
    for (int t = 0; t + r < n; ++t) s += resid[t] * resid[t + r];
    out.gamma[r] = s / n;
  }
  return out;
}

BandedToeplitzCov::BandedToeplitzCov(const AutocovSeq& acov, int band, int dim, bool taper)
    : dim_(dim), taper_(taper) {
  if (dim <= 0) throw std::invalid_argument("covariance dimension must be positive");
  if (band < 0) throw std::invalid_argument("band length must be nonnegative");
  if (band > acov.max_lag())
    throw std::invalid_argument("band exceeds available autocovariance lags");
  if (band >= dim) throw std::invalid_argument("band length must be smaller than the dimension");

  weighted_.resize(band + 1);
  for (int d = 0; d <= band; ++d) {
    // Bartlett taper weight; a band of zero degenerates to gamma_0 * I.
    const double w = !taper ? 1.0 : (band == 0 ? (d == 0 ? 1.0 : 0.0)
                                               : std::max(1.0 - double(d) / band, 0.0));
    weighted_[d] = w * acov.gamma[d];
  }
}

Eigen::MatrixXd BandedToeplitzCov::densify() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  for (Eigen::Index i = 0; i < dim_; ++i)
    for (Eigen::Index j = 0; j < dim_; ++j) m(i, j) = entry(i, j);
  return m;
}

Eigen::VectorXd BandedToeplitzCov::apply(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("vector length does not match dimension");
  const int l = band();
  Eigen::VectorXd out(dim_);
  for (int i = 0; i < dim_; ++i) {
    double s = weighted_[0] * x[i];
    const int lo = std::max(0, i - l);
    const int hi = std::min(dim_ - 1, i + l);
    for (int j = lo; j < i; ++j) s += weighted_[i - j] * x[j];
    for (int j = i + 1; j <= hi; ++j) s += weighted_[j - i] * x[j];
    out[i] = s;
  }
  return out;
}

BandedCholesky::BandedCholesky(const BandedToeplitzCov& cov, double ridge)
    : n_(cov.dim()), l_(cov.band()) {
  if (ridge < 0.0) throw std::invalid_argument("ridge must be nonnegative");
  const Eigen::VectorXd& a = cov.weighted_;
  const double diag = a[0] + ridge * a[0];

  factor_ = Eigen::MatrixXd::Zero(l_ + 1, n_);
  for (int j = 0; j < n_; ++j) {
    double s = diag;
    for (int k = std::max(0, j - l_); k < j; ++k) {
      const double v = factor_(j - k, k);
      s -= v * v;
    }
    if (!(s > 0.0) || !std::isfinite(s))
      throw FactorizationError("banded Cholesky pivot " + std::to_string(j) +
                               " is not positive");
    const double pivot = std::sqrt(s);
    factor_(0, j) = pivot;
    const int imax = std::min(j + l_, n_ - 1);
    for (int i = j + 1; i <= imax; ++i) {
      double t = a[i - j];
      for (int k = std::max(0, i - l_); k < j; ++k) t -= factor_(i - k, k) * factor_(j - k, k);
      factor_(i - j, j) = t / pivot;
    }
  }
}

Eigen::VectorXd BandedCholesky::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw std::invalid_argument("right-hand side length does not match");
  Eigen::VectorXd x = b;
  // forward: L y = b
  for (int j = 0; j < n_; ++j) {
    double s = x[j];
    for (int k = std::max(0, j - l_); k < j; ++k) s -= factor_(j - k, k) * x[k];
    x[j] = s / factor_(0, j);
  }
  // backward: L^T x = y
  for (int j = n_ - 1; j >= 0; --j) {
    double s = x[j];
    const int imax = std::min(j + l_, n_ - 1);
    for (int i = j + 1; i <= imax; ++i) s -= factor_(i - j, j) * x[i];
    x[j] = s / factor_(0, j);
  }
  return x;
}

Eigen::VectorXd BandedToeplitzCov::solve(const Eigen::VectorXd& b, double ridge) const {
  std::shared_ptr<const BandedCholesky> fact;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (!cache_ || cache_ridge_ != ridge) {
      cache_ = std::make_shared<BandedCholesky>(*this, ridge);
      cache_ridge_ = ridge;
    }
    fact = cache_;
  }
  return fact->solve(b);
}

BandedToeplitzCov build_cov(const AutocovSeq& gamma, int band, int dim, bool taper) {
  return BandedToeplitzCov(gamma, band, dim, taper);
}

Eigen::VectorXd solve_banded(const BandedToeplitzCov& cov, const Eigen::VectorXd& b,
                             double ridge) {
  return cov.solve(b, ridge);
}

}  // namespace tss
