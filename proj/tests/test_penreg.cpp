#include <doctest.h>

#include <Eigen/QR>
#include <cmath>

#include "tss/penreg.hpp"
#include "tss/rng.hpp"

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

Eigen::MatrixXd orthonormal_columns(int n, int p, std::uint64_t seed) {
  const Eigen::MatrixXd A = random_matrix(n, p, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  return Eigen::MatrixXd(qr.householderQ()).leftCols(p);
}

}  // namespace

TEST_CASE("orthonormal design closed form") {
  const int n = 30, p = 5;
  const Eigen::MatrixXd Q = orthonormal_columns(n, p, 1u);
  const Eigen::VectorXd y = random_vector(n, 2u);
  Eigen::VectorXd w(p);
  w << 1.0, 0.5, 2.0, 1.0, 3.0;
  for (double lambda : {0.05, 0.3, 1.0}) {
    const CdResult fit = lasso_cd(Q, y, lambda, w, 1e-12, 100000);
    REQUIRE(fit.converged);
    for (int j = 0; j < p; ++j) {
      const double z = Q.col(j).dot(y);
      const double expect =
          (z > 0 ? 1.0 : -1.0) * std::max(std::abs(z) - 0.5 * lambda * w[j], 0.0);
      CHECK(std::abs(fit.beta[j] - expect) < 1e-10);
    }
  }
}

TEST_CASE("lambda zero reproduces OLS") {
  const int n = 40, p = 4;
  const Eigen::MatrixXd X = random_matrix(n, p, 3u);
  const Eigen::VectorXd y = random_vector(n, 4u);
  const CdResult fit = lasso_cd(X, y, 0.0, Eigen::VectorXd::Ones(p), 1e-13, 200000);
  const Eigen::VectorXd ols = X.colPivHouseholderQr().solve(y);
  CHECK((fit.beta - ols).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("lambda at or above lambda_max gives the zero vector") {
  const int n = 25, p = 6;
  const Eigen::MatrixXd X = random_matrix(n, p, 5u);
  const Eigen::VectorXd y = random_vector(n, 6u);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(p);
  double lambda_max = 0.0;
  for (int j = 0; j < p; ++j)
    lambda_max = std::max(lambda_max, 2.0 * std::abs(X.col(j).dot(y)));
  const CdResult fit = lasso_cd(X, y, lambda_max * (1 + 1e-9), w, 1e-12, 1000);
  CHECK(fit.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("objective is nonincreasing across sweeps") {
  const int n = 30, p = 10;
  const Eigen::MatrixXd X = random_matrix(n, p, 7u);
  const Eigen::VectorXd y = random_vector(n, 8u);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(p);
  const double lambda = 2.0;
  // k sweeps from zero is a prefix of k+1 sweeps of the same cyclic order
  double prev = lasso_objective(X, y, Eigen::VectorXd::Zero(p), lambda, w);
  for (int sweeps = 1; sweeps <= 12; ++sweeps) {
    const CdResult fit = lasso_cd(X, y, lambda, w, 0.0, sweeps);
    const double obj = lasso_objective(X, y, fit.beta, lambda, w);
    CHECK(obj <= prev + 1e-12);
    prev = obj;
  }
}

TEST_CASE("non-convergence is reported, not hidden") {
  const int n = 30, p = 8;
  const Eigen::MatrixXd X = random_matrix(n, p, 9u);
  const Eigen::VectorXd y = random_vector(n, 10u);
  const CdResult fit = lasso_cd(X, y, 0.01, Eigen::VectorXd::Ones(p), 1e-15, 1);
  CHECK_FALSE(fit.converged);
}

TEST_CASE("path grid and warm starts") {
  const int n = 40, p = 12;
  const Eigen::MatrixXd X = random_matrix(n, p, 11u);
  Eigen::VectorXd y = X.col(0) - 2.0 * X.col(5) + random_vector(n, 12u);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(p);
  const LassoPath path = lasso_path(X, y, w, 30);
  REQUIRE(path.size() == 30);
  REQUIRE(path.converged);

  SUBCASE("first grid point has an empty active set") {
    CHECK(path.active_sets[0].empty());
  }
  SUBCASE("rss is nonincreasing along the grid") {
    for (int i = 1; i < path.size(); ++i) CHECK(path.rss[i] <= path.rss[i - 1] + 1e-9);
  }
  SUBCASE("warm-started solutions match cold starts") {
    for (int i : {3, 11, 29}) {
      const CdResult cold = lasso_cd(X, y, path.lambdas[i], w, 1e-11, 200000);
      CHECK((cold.beta - path.coefs[i]).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
  SUBCASE("every path point satisfies the KKT conditions") {
    for (int i = 0; i < path.size(); ++i)
      CHECK(lasso_kkt_violation(X, y, path.coefs[i], path.lambdas[i], w) <= 1e-6);
  }
}

TEST_CASE("adaptive lasso weighting") {
  const int n = 50, p = 3;
  const Eigen::MatrixXd X = random_matrix(n, p, 13u);
  Eigen::VectorXd y = X * Eigen::Vector3d(1.5, 1.0, -1.0) + random_vector(n, 14u);

  SUBCASE("unit initial estimates reduce to the plain lasso") {
    const LassoPath plain = lasso_path(X, y, Eigen::VectorXd::Ones(p), 20);
    const LassoPath adaptive = adaptive_lasso(X, y, Eigen::VectorXd::Ones(p), 20);
    for (int i = 0; i < 20; ++i)
      CHECK((plain.coefs[i] - adaptive.coefs[i]).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("zero initial coefficient excludes the column on the whole path") {
    Eigen::VectorXd init(p);
    init << 1.0, 0.0, 1.0;
    const LassoPath path = adaptive_lasso(X, y, init, 25);
    for (int i = 0; i < path.size(); ++i) CHECK(path.coefs[i][1] == 0.0);
  }
  SUBCASE("light weight keeps its variable active first") {
    Eigen::VectorXd init(p);
    init << 1.0, 0.1, 0.1;  // weights (1, 10, 10)
    const LassoPath path = adaptive_lasso(X, y, init, 40);
    bool solo = false;
    for (int i = 0; i < path.size(); ++i) {
      CHECK(lasso_kkt_violation(X, y, path.coefs[i], path.lambdas[i], path.weights) <= 1e-6);
      if (path.active_sets[i] == std::vector<int>{0}) solo = true;
    }
    CHECK(solo);
  }
  SUBCASE("all-zero initial estimate is rejected") {
    CHECK_THROWS_AS(adaptive_lasso(X, y, Eigen::VectorXd::Zero(p), 10), std::invalid_argument);
  }
}

TEST_CASE("modified BIC selection") {
  SUBCASE("single-point path") {
    LassoPath path;
    path.lambdas = Eigen::VectorXd::Constant(1, 0.5);
    path.rss = Eigen::VectorXd::Constant(1, 2.0);
    path.coefs = {Eigen::VectorXd::Zero(3)};
    path.active_sets = {{0}};
    CHECK(mbic_select(path, 100, 3).index == 0);
  }
  SUBCASE("equal rss favors the smaller support") {
    LassoPath path;
    path.lambdas.resize(2);
    path.lambdas << 1.0, 0.5;
    path.rss.resize(2);
    path.rss << 3.0, 3.0;
    path.coefs = {Eigen::VectorXd::Zero(10), Eigen::VectorXd::Zero(10)};
    path.active_sets = {{0, 1}, {0, 1, 2, 3, 4}};
    CHECK(mbic_select(path, 200, 10).index == 0);
    // and ties break toward the larger lambda
    path.active_sets = {{0, 1}, {0, 1}};
    CHECK(mbic_select(path, 200, 10).index == 0);
  }
  SUBCASE("strong two-variable signal: support always kept, sparsity penalty bites") {
    // Frozen from the Monte-Carlo oracle: at p = 10 the log(log p) penalty
    // (~.022 per variable) is beaten by a noise variable's chi-square refit
    // gain in roughly a quarter of runs, so exact recovery plateaus near .75
    // through the adaptive pipeline and near .45 on the plain path. The
    // criterion must always keep the strong variables and must not drift
    // toward the dense end of the path.
    const int n = 200, p = 10, reps = 200;
    int contains = 0, exact_pipeline = 0;
    long long size_sum = 0;
    for (int r = 0; r < reps; ++r) {
      const Eigen::MatrixXd X = random_matrix(n, p, 1000 + r);
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
      beta[0] = 3.0;
      beta[1] = -3.0;
      const Eigen::VectorXd y = X * beta + random_vector(n, 2000 + r);
      const LassoPath path = lasso_path(X, y, Eigen::VectorXd::Ones(p), 60);
      const MbicChoice choice = mbic_select(path, n, p);
      const auto& support = path.active_sets[choice.index];
      size_sum += static_cast<long long>(support.size());
      static constexpr int kTrue[] = {0, 1};
      if (std::includes(support.begin(), support.end(), std::begin(kTrue), std::end(kTrue)))
        ++contains;

      TwoStageOptions opt;
      opt.first_stage = FirstStage::None;
      opt.grid_size = 60;
      if (two_stage(X, y, opt).selected_support == std::vector<int>{0, 1}) ++exact_pipeline;
    }
    CHECK(contains == reps);
    CHECK(double(size_sum) / reps < 4.0);
    CHECK(exact_pipeline >= int(0.65 * reps));
  }
}

TEST_CASE("two-stage estimator") {
  const int n = 60, p = 15;
  const Eigen::MatrixXd X = random_matrix(n, p, 21u);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta[2] = 2.0;
  beta[7] = -1.5;
  const Eigen::VectorXd y = X * beta + 0.5 * random_vector(n, 22u);

  SUBCASE("coefficients are zero off the screened set") {
    TwoStageOptions opt;
    opt.first_stage = FirstStage::Sis;
    opt.d_n = 5;
    opt.grid_size = 40;
    const TwoStageResult res = two_stage(X, y, opt);
    REQUIRE(res.screened.size() == 5);
    for (int j = 0; j < p; ++j) {
      const bool in = std::find(res.screened.begin(), res.screened.end(), j) !=
                      res.screened.end();
      if (!in) CHECK(res.coefs[j] == 0.0);
    }
    for (const auto& active : res.path.active_sets)
      for (int j : active)
        CHECK(std::find(res.screened.begin(), res.screened.end(), j) != res.screened.end());
  }
  SUBCASE("d_n = p equals the standalone pipeline") {
    TwoStageOptions full;
    full.first_stage = FirstStage::Glss;
    full.d_n = p;
    full.grid_size = 40;
    TwoStageOptions none;
    none.first_stage = FirstStage::None;
    none.grid_size = 40;
    const TwoStageResult a = two_stage(X, y, full);
    const TwoStageResult b = two_stage(X, y, none);
    CHECK((a.coefs - b.coefs).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.intercept == b.intercept);
  }
  SUBCASE("a true variable dropped at stage one makes exact recovery impossible") {
    TwoStageOptions opt;
    opt.first_stage = FirstStage::Sis;
    opt.d_n = 3;
    opt.grid_size = 40;
    const TwoStageResult res = two_stage(X, y, opt);
    if (!coverage(res.screened, {2, 7})) {
      CHECK_FALSE(path_hits_support(res.path, {2, 7}));
    } else {
      CHECK(true);  // screening kept both; nothing to assert here
    }
  }
  SUBCASE("orthogonal response yields a flagged empty model") {
    // response exactly orthogonal to every centered column
    Eigen::MatrixXd Xo = random_matrix(30, 4, 23u);
    Eigen::MatrixXd Xc = Xo.rowwise() - Xo.colwise().mean().eval();
    Eigen::VectorXd v = random_vector(30, 24u);
    v = v.array() - v.mean();
    // project v off the column space
    const Eigen::MatrixXd Q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(Xc).householderQ() *
        Eigen::MatrixXd::Identity(30, 4);
    const Eigen::VectorXd yo = v - Q * (Q.transpose() * v);
    TwoStageOptions opt;
    opt.first_stage = FirstStage::None;
    const TwoStageResult res = two_stage(Xo, yo, opt);
    CHECK(res.empty_model);
    CHECK(res.coefs.cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(res.warnings.empty());
  }
}

TEST_CASE("weights validation") {
  const Eigen::MatrixXd X = random_matrix(10, 2, 25u);
  const Eigen::VectorXd y = random_vector(10, 26u);
  Eigen::VectorXd w(2);
  w << -1.0, 1.0;
  CHECK_THROWS_AS(lasso_cd(X, y, 1.0, w, 1e-9, 10), std::invalid_argument);
  CHECK_THROWS_AS(lasso_path(X, y, w, 10), std::invalid_argument);
}
