#include "tss/screen.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "tss/covest.hpp"
#include "tss/parallel.hpp"

namespace tss {

namespace {

struct Processed {
  Eigen::MatrixXd X;  // centered, optionally standardized
  Eigen::VectorXd y;  // centered
  std::vector<int> degenerate;  // zero/near-zero variance columns
};

// Columns are centered always; a column whose centered mean square is
// negligible against its raw mean square can never carry signal and is
// flagged instead of dividing by ~0.
Processed preprocess(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool standardize) {
  const Eigen::Index n = X.rows();
  if (n < 2) throw std::invalid_argument("screening needs at least two rows");
  if (y.size() != n) throw std::invalid_argument("response length does not match row count");

  Processed out;
  out.X = X.rowwise() - X.colwise().mean();
  out.y = y.array() - y.mean();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var = out.X.col(j).squaredNorm() / n;
    const double raw_msq = X.col(j).squaredNorm() / n;
    if (var <= 1e-16 * std::max(1.0, raw_msq)) {
      out.degenerate.push_back(static_cast<int>(j));
      out.X.col(j).setZero();
    } else if (standardize) {
      out.X.col(j) /= std::sqrt(var);
    }
  }
  return out;
}

void note_degenerate(const std::vector<int>& cols, std::vector<ColumnNote>* warnings) {
  if (!warnings) return;
  for (int j : cols)
    warnings->push_back({j, "zero-variance column; score set to 0, never selected"});
}

}  // namespace

Eigen::VectorXd sis_scores(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool standardize,
                           std::vector<ColumnNote>* warnings) {
  Processed pr = preprocess(X, y, standardize);
  note_degenerate(pr.degenerate, warnings);
  const Eigen::Index p = X.cols();
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double sxx = pr.X.col(j).squaredNorm();
    if (sxx > 0.0) scores[j] = pr.X.col(j).dot(pr.y) / sxx;
  }
  return scores;
}

Eigen::VectorXd glss_scores(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int band,
                            bool taper, bool standardize, std::vector<ColumnNote>* warnings,
                            int jobs) {
  const int n = static_cast<int>(X.rows());
  if (band < 0) throw std::invalid_argument("band length must be nonnegative");
  if (band >= n) throw std::invalid_argument("band length must be smaller than the sample size");

  Processed pr = preprocess(X, y, standardize);
  note_degenerate(pr.degenerate, warnings);
  const int p = static_cast<int>(X.cols());
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(p);

  std::mutex warn_mutex;
  auto warn = [&](int column, const std::string& msg) {
    if (!warnings) return;
    std::lock_guard<std::mutex> lock(warn_mutex);
    warnings->push_back({column, msg});
  };

  parallel_for(jobs, p, [&](int j) {
    const Eigen::VectorXd x = pr.X.col(j);
    const double sxx = x.squaredNorm();
    if (sxx <= 0.0) return;  // degenerate column, already flagged
    const double rho = x.dot(pr.y) / sxx;
    const Eigen::VectorXd resid = pr.y - rho * x;

    const AutocovSeq acov = sample_autocov(resid, band);
    const BandedToeplitzCov cov(acov, band, n, taper);

    // PD escalation: retry with a small ridge before giving up on the column.
    static constexpr double kRidges[] = {0.0, 1e-8, 1e-6};
    for (std::size_t r = 0; r < std::size(kRidges); ++r) {
      try {
        const BandedCholesky fact(cov, kRidges[r]);
        const Eigen::VectorXd u = fact.solve(x);
        const double den = u.dot(x);
        const double num = u.dot(pr.y);
        if (!(den > 0.0) || !std::isfinite(num))
          throw FactorizationError("degenerate GLS quadratic form");
        scores[j] = num / den;
        if (r > 0) warn(j, "covariance ridge escalated to " + std::to_string(kRidges[r]));
        return;
      } catch (const FactorizationError&) {
        // try the next ridge
      }
    }
    warn(j, "covariance factorization failed for column " + std::to_string(j) +
                " after ridge escalation; score set to 0");
  });
  return scores;
}

std::vector<int> rank_by_magnitude(const Eigen::VectorXd& scores) {
  std::vector<int> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double fa = std::abs(scores[a]), fb = std::abs(scores[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  });
  return idx;
}

std::vector<int> select(const Eigen::VectorXd& scores, const SelectionRule& rule) {
  std::vector<int> out;
  if (rule.kind == SelectionRule::Kind::Top) {
    if (rule.d_n < 0 || rule.d_n > scores.size())
      throw std::invalid_argument("top-d selection size out of range");
    const std::vector<int> ranking = rank_by_magnitude(scores);
    out.assign(ranking.begin(), ranking.begin() + rule.d_n);
    std::sort(out.begin(), out.end());
  } else {
    if (rule.gamma_n < 0.0) throw std::invalid_argument("threshold must be nonnegative");
    for (int j = 0; j < scores.size(); ++j)
      if (std::abs(scores[j]) >= rule.gamma_n && (rule.gamma_n > 0.0 || scores[j] != 0.0))
        out.push_back(j);
  }
  return out;
}

bool coverage(const std::vector<int>& selected, const std::vector<int>& true_support) {
  for (int t : true_support)
    if (std::find(selected.begin(), selected.end(), t) == selected.end()) return false;
  return true;
}

ScreeningResult screen(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const ScreenOptions& options, const SelectionRule& rule) {
  ScreeningResult res;
  res.method = options.method;
  res.band = options.band;
  res.taper = options.taper;
  res.standardize = options.standardize;
  res.scores = options.method == ScreenMethod::Sis
                   ? sis_scores(X, y, options.standardize, &res.warnings)
                   : glss_scores(X, y, options.band, options.taper, options.standardize,
                                 &res.warnings, options.jobs);
  res.ranking = rank_by_magnitude(res.scores);
  res.selected = select(res.scores, rule);
  return res;
}

}  // namespace tss
