#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace tss {

/// Sample autocovariances gamma_0..gamma_L of a residual vector.
struct AutocovSeq {
  Eigen::VectorXd gamma;
  int n = 0;  // underlying sample size
  int max_lag() const { return static_cast<int>(gamma.size()) - 1; }
};

/// gamma_r = (1/n) sum_{t=1}^{n-r} resid_t resid_{t+r}, uncentered, divisor n.
/// The divisor-n triangular sum keeps |gamma_r| <= gamma_0 and makes the
/// tapered covariance below positive semidefinite.
AutocovSeq sample_autocov(const Eigen::VectorXd& resid, int max_lag);

struct FactorizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Symmetric n x n Toeplitz covariance with entry (i,j) equal to
/// gamma_{|i-j|} * w(|i-j|), where w = 1 on the band (banded variant) or
/// w(d) = max(1 - d/l, 0) (tapered variant). Storage is O(l); the matrix is
/// densified only on demand for testing.
class BandedToeplitzCov {
 public:
  BandedToeplitzCov(const AutocovSeq& acov, int band, int dim, bool taper);
  BandedToeplitzCov(const BandedToeplitzCov& o)
      : weighted_(o.weighted_), dim_(o.dim_), taper_(o.taper_) {}
  BandedToeplitzCov& operator=(const BandedToeplitzCov& o) {
    weighted_ = o.weighted_;
    dim_ = o.dim_;
    taper_ = o.taper_;
    cache_.reset();
    cache_ridge_ = -1.0;
    return *this;
  }

  int band() const { return static_cast<int>(weighted_.size()) - 1; }
  int dim() const { return dim_; }
  bool tapered() const { return taper_; }
  double gamma0() const { return weighted_[0]; }

  double entry(Eigen::Index i, Eigen::Index j) const {
    const Eigen::Index d = i >= j ? i - j : j - i;
    return d < weighted_.size() ? weighted_[d] : 0.0;
  }
  Eigen::MatrixXd densify() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /// Solves (cov + ridge*gamma_0*I) x = b. The factorization is cached per
  /// ridge value and shared across right-hand sides; safe for concurrent use.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, double ridge = 0.0) const;

 private:
  friend class BandedCholesky;
  Eigen::VectorXd weighted_;  // w(d) * gamma_d, d = 0..band
  int dim_ = 0;
  bool taper_ = false;
  mutable std::mutex cache_mutex_;
  mutable std::shared_ptr<const class BandedCholesky> cache_;
  mutable double cache_ridge_ = -1.0;
};

/// Cholesky factor of (cov + ridge*gamma_0*I); O(n l^2) to build, O(n l) per
/// solve. Immutable after construction, safe to share across threads.
class BandedCholesky {
 public:
  BandedCholesky(const BandedToeplitzCov& cov, double ridge);  // throws FactorizationError
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  int dim() const { return n_; }
  int band() const { return l_; }

 private:
  int n_ = 0, l_ = 0;
  Eigen::MatrixXd factor_;  // (l+1) x n band storage: factor_(d, j) = L(j+d, j)
};

/// Builds the banded (taper = false) or tapered (taper = true) covariance.
BandedToeplitzCov build_cov(const AutocovSeq& gamma, int band, int dim, bool taper);

/// Solves (cov + ridge*gamma_0*I) x = b through the cached factorization.
Eigen::VectorXd solve_banded(const BandedToeplitzCov& cov, const Eigen::VectorXd& b,
                             double ridge = 0.0);

}  // namespace tss
