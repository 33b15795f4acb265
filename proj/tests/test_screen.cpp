#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tss/bench.hpp"
#include "tss/covest.hpp"
#include "tss/rng.hpp"
#include "tss/screen.hpp"

using namespace tss;

namespace {

Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rng.gaussian();
  return X;
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

// centered (and optionally standardized) copy, matching the screening rules
void center(Eigen::MatrixXd& X, Eigen::VectorXd& y, bool standardize) {
  X = X.rowwise() - X.colwise().mean().eval();
  y = y.array() - y.mean();
  if (standardize)
    for (int j = 0; j < X.cols(); ++j) X.col(j) /= std::sqrt(X.col(j).squaredNorm() / X.rows());
}

}  // namespace

TEST_CASE("sis recovers the exact projection") {
  const Eigen::VectorXd y = random_vector(30, 1u);
  Eigen::MatrixXd X(30, 1);
  X.col(0) = y;
  const Eigen::VectorXd s = sis_scores(X, y, false);
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("orthogonal column scores zero") {
  Eigen::MatrixXd X(4, 1);
  X << 1, 1, -1, -1;
  Eigen::VectorXd y(4);
  y << 1, -1, 1, -1;
  const Eigen::VectorXd s = sis_scores(X, y, false);
  CHECK(s[0] == doctest::Approx(0.0));
}

TEST_CASE("sis equals the per-column least-squares oracle") {
  Eigen::MatrixXd X = random_matrix(6, 3, 2u);
  Eigen::VectorXd y = random_vector(6, 3u);
  const Eigen::VectorXd s = sis_scores(X, y, true);

  Eigen::MatrixXd Xc = X;
  Eigen::VectorXd yc = y;
  center(Xc, yc, true);
  for (int j = 0; j < 3; ++j) {
    const double oracle =
        (Xc.col(j).transpose() * Xc.col(j)).inverse()(0, 0) * Xc.col(j).dot(yc);
    CHECK(std::abs(s[j] - oracle) < 1e-12);
  }
}

TEST_CASE("zero-variance column policy") {
  Eigen::MatrixXd X = random_matrix(20, 3, 4u);
  X.col(1).setConstant(3.5);
  const Eigen::VectorXd y = random_vector(20, 5u);
  std::vector<ColumnNote> warnings;
  const Eigen::VectorXd s = sis_scores(X, y, true, &warnings);
  CHECK(s[1] == 0.0);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].column == 1);
  // never selected by a positive threshold nor by top-p ranking over nonzeros
  const auto sel = select(s, SelectionRule::threshold(0.0));
  CHECK(std::find(sel.begin(), sel.end(), 1) == sel.end());
}

TEST_CASE("glss with band zero equals sis") {
  const Eigen::MatrixXd X = random_matrix(50, 8, 6u);
  Eigen::VectorXd y = X.col(0) * 0.7 + random_vector(50, 7u);
  const Eigen::VectorXd sis = sis_scores(X, y, true);
  for (bool taper : {false, true}) {
    const Eigen::VectorXd glss = glss_scores(X, y, 0, taper, true);
    for (int j = 0; j < 8; ++j)
      CHECK(std::abs(glss[j] - sis[j]) <= 1e-12 * std::max(1.0, std::abs(sis[j])));
  }
}

TEST_CASE("glss equals the dense GLS oracle") {
  SUBCASE("small instance from the contract") {
    const int n = 20, band = 3;
    const Eigen::MatrixXd X = random_matrix(n, 2, 8u);
    Eigen::VectorXd y = 0.5 * X.col(0) + random_vector(n, 9u);
    const Eigen::VectorXd s = glss_scores(X, y, band, true, true);

    Eigen::MatrixXd Xc = X;
    Eigen::VectorXd yc = y;
    center(Xc, yc, true);
    for (int j = 0; j < 2; ++j) {
      const Eigen::VectorXd x = Xc.col(j);
      const double rho = x.dot(yc) / x.squaredNorm();
      const Eigen::VectorXd resid = yc - rho * x;
      const BandedToeplitzCov cov(sample_autocov(resid, band), band, n, true);
      const Eigen::MatrixXd inv = cov.densify().inverse();
      const double oracle = (x.transpose() * inv * x).inverse()(0, 0) *
                            (x.transpose() * inv * yc)(0, 0);
      CHECK(std::abs(s[j] - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
    }
  }
  SUBCASE("random instances up to n = 100") {
    for (std::uint64_t trial = 0; trial < 8; ++trial) {
      const int n = 30 + static_cast<int>(trial) * 10;
      const int band = 5;
      const Eigen::MatrixXd X = random_matrix(n, 3, 100 + trial);
      Eigen::VectorXd y = X.col(1) - 0.4 * X.col(2) + random_vector(n, 200 + trial);
      const Eigen::VectorXd s = glss_scores(X, y, band, true, true);
      Eigen::MatrixXd Xc = X;
      Eigen::VectorXd yc = y;
      center(Xc, yc, true);
      for (int j = 0; j < 3; ++j) {
        const Eigen::VectorXd x = Xc.col(j);
        const double rho = x.dot(yc) / x.squaredNorm();
        const BandedToeplitzCov cov(sample_autocov(yc - rho * x, band), band, n, true);
        const Eigen::MatrixXd inv = cov.densify().inverse();
        const double oracle = (x.transpose() * inv * x).inverse()(0, 0) *
                              (x.transpose() * inv * yc)(0, 0);
        CHECK(std::abs(s[j] - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
      }
    }
  }
}

TEST_CASE("glss flags columns whose covariance cannot be factorized") {
  // a slowly varying response leaves the noise column with residuals whose
  // lag-1 autocovariance exceeds half of gamma_0, so the band-1 truncation
  // (no taper) is indefinite and the ridge escalation cannot rescue it
  const int n = 60;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  Rng rng(10u);
  for (int t = 0; t < n; ++t) {
    y[t] = 10.0 * std::sin(2.0 * M_PI * t / n);
    X(t, 0) = rng.gaussian();
    X(t, 1) = y[t] + 0.05 * rng.gaussian();
  }
  std::vector<ColumnNote> warnings;
  const Eigen::VectorXd s = glss_scores(X, y, 1, /*taper=*/false, true, &warnings);
  CHECK(s[0] == 0.0);
  CHECK(s[1] != 0.0);
  REQUIRE(!warnings.empty());
  CHECK(warnings[0].column == 0);
  CHECK(warnings[0].message.find("factorization failed") != std::string::npos);

  // the tapered default stays total on the same data
  std::vector<ColumnNote> taper_warnings;
  const Eigen::VectorXd st = glss_scores(X, y, 1, /*taper=*/true, true, &taper_warnings);
  CHECK(st.allFinite());
  CHECK(taper_warnings.empty());
}

TEST_CASE("selection rules") {
  Eigen::VectorXd scores(3);
  scores << 3, -1, 2;
  CHECK(select(scores, SelectionRule::top(2)) == std::vector<int>{0, 2});

  Eigen::VectorXd with_zero(3);
  with_zero << 1.0, 0.0, -0.2;
  CHECK(select(with_zero, SelectionRule::threshold(0.0)) == std::vector<int>{0, 2});

  Eigen::VectorXd boundary(3);
  boundary << 1, -1, 0.5;
  CHECK(select(boundary, SelectionRule::threshold(1.0)) == std::vector<int>{0, 1});

  SUBCASE("ties break toward the smaller index") {
    Eigen::VectorXd tied(4);
    tied << 2, -2, 2, 1;
    const auto ranking = rank_by_magnitude(tied);
    CHECK(ranking == std::vector<int>{0, 1, 2, 3});
    CHECK(select(tied, SelectionRule::top(2)) == std::vector<int>{0, 1});
  }
  SUBCASE("nestedness over the full chain") {
    const Eigen::VectorXd s = random_vector(20, 11u);
    std::vector<int> prev;
    for (int d = 0; d <= 20; ++d) {
      const auto cur = select(s, SelectionRule::top(d));
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST_CASE("coverage containment") {
  CHECK(coverage({1, 2, 3}, {}));
  CHECK(coverage({1, 2, 3}, {2, 3}));
  CHECK_FALSE(coverage({1, 2}, {2, 3}));
}

TEST_CASE("permutation equivariance") {
  const int n = 30, p = 6;
  const Eigen::MatrixXd X = random_matrix(n, p, 12u);
  Eigen::VectorXd y = X.col(2) + 0.5 * X.col(4) + random_vector(n, 13u);
  const std::vector<int> perm = {3, 0, 5, 1, 4, 2};
  Eigen::MatrixXd Xp(n, p);
  for (int j = 0; j < p; ++j) Xp.col(j) = X.col(perm[j]);

  for (ScreenMethod method : {ScreenMethod::Sis, ScreenMethod::Glss}) {
    ScreenOptions o;
    o.method = method;
    o.band = 4;
    const auto base = screen(X, y, o, SelectionRule::top(3));
    const auto permuted = screen(Xp, y, o, SelectionRule::top(3));
    for (int j = 0; j < p; ++j) CHECK(permuted.scores[j] == base.scores[perm[j]]);
    std::vector<int> mapped;
    for (int j : permuted.selected) mapped.push_back(perm[j]);
    std::sort(mapped.begin(), mapped.end());
    std::vector<int> expect = base.selected;
    std::sort(expect.begin(), expect.end());
    CHECK(mapped == expect);
  }
}

TEST_CASE("scale behavior") {
  const int n = 40, p = 5;
  const Eigen::MatrixXd X = random_matrix(n, p, 14u);
  const Eigen::VectorXd y = X.col(0) - X.col(3) + random_vector(n, 15u);
  const double c = 7.25;
  Eigen::MatrixXd Xs = X;
  Xs.col(2) *= c;

  SUBCASE("raw score scales by 1/c") {
    const Eigen::VectorXd base = sis_scores(X, y, false);
    const Eigen::VectorXd scaled = sis_scores(Xs, y, false);
    CHECK(scaled[2] == doctest::Approx(base[2] / c).epsilon(1e-12));
  }
  SUBCASE("standardized ranking is scale-invariant") {
    ScreenOptions o;
    o.method = ScreenMethod::Glss;
    o.band = 3;
    const auto base = screen(X, y, o, SelectionRule::top(2));
    const auto scaled = screen(Xs, y, o, SelectionRule::top(2));
    CHECK(base.ranking == scaled.ranking);
    CHECK(base.selected == scaled.selected);
  }
}

TEST_CASE("glss estimates have the smaller sampling variance under strong error correlation") {
  // univariate efficiency: variance ratio below (1-a^2)/(1+a^2) + .05 at a = .9
  const MarginalVariance mv = mc_marginal_variance(0.9, 0.0, 200, 5000, 15, true, 77u, 2);
  CHECK(mv.gls / mv.ols < (1.0 - 0.81) / (1.0 + 0.81) + 0.05);
}
