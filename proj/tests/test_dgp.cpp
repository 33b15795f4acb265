#include <doctest.h>

#include <cmath>

#include "tss/dgp.hpp"

using namespace tss;

namespace {

double col_var(const Eigen::MatrixXd& X, int j) {
  const Eigen::VectorXd c = X.col(j).array() - X.col(j).mean();
  return c.squaredNorm() / X.rows();
}

double lag1_autocorr(const Eigen::VectorXd& v) {
  const Eigen::VectorXd c = v.array() - v.mean();
  double num = 0.0;
  for (int t = 0; t + 1 < c.size(); ++t) num += c[t] * c[t + 1];
  return num / c.squaredNorm();
}

}  // namespace

TEST_CASE("var1 with zero coefficient is iid") {
  VarCoefSpec coef;
  coef.kind = CoefKind::Diag;
  coef.value = 0.0;
  coef.p = 3;
  InnovationSpec innov;  // standard Gaussian, identity
  const Eigen::MatrixXd X = gen_var1(coef, innov, 100000, 0, 7u);
  for (int j = 0; j < 3; ++j) CHECK(col_var(X, j) == doctest::Approx(1.0).epsilon(0.02));
  // columns uncorrelated
  const Eigen::VectorXd a = X.col(0).array() - X.col(0).mean();
  const Eigen::VectorXd b = X.col(1).array() - X.col(1).mean();
  CHECK(std::abs(a.dot(b) / X.rows()) < 0.02);
}

TEST_CASE("stationary AR(1) covariate moments") {
  VarCoefSpec coef;
  coef.kind = CoefKind::Diag;
  coef.value = 0.4;
  coef.p = 2;
  InnovationSpec innov;
  const Eigen::MatrixXd X = gen_var1(coef, innov, 100000, 500, 11u);
  const double target = 1.0 / (1.0 - 0.16);
  for (int j = 0; j < 2; ++j) {
    CHECK(col_var(X, j) == doctest::Approx(target).epsilon(0.02));
    CHECK(lag1_autocorr(X.col(j)) == doctest::Approx(0.4).epsilon(0.02));
  }
}

TEST_CASE("student-t innovations hit the target covariance") {
  // t_5(0, V) with V = (3/5) Sigma has covariance (5/3) V = Sigma
  InnovationSpec innov;
  innov.kind = InnovKind::StudentT;
  innov.dof = 5;
  innov.cov = InnovCov::ToeplitzRho;
  innov.rho = 0.3;
  InnovationSampler sampler(innov, 3);
  Rng rng(13u);
  const int n = 100000;
  Eigen::MatrixXd draws(n, 3);
  Eigen::VectorXd v;
  for (int t = 0; t < n; ++t) {
    sampler.draw(rng, v);
    draws.row(t) = v;
  }
  const Eigen::MatrixXd centered = draws.rowwise() - draws.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / n;
  CHECK(cov(0, 0) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(cov(1, 1) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(cov(0, 1) == doctest::Approx(0.3).epsilon(0.1));
  CHECK(cov(0, 2) == doctest::Approx(0.09).epsilon(0.25));
}

TEST_CASE("var1 with t5 innovations keeps the scaled variance") {
  VarCoefSpec coef;
  coef.kind = CoefKind::Diag;
  coef.value = 0.4;
  coef.p = 2;
  InnovationSpec innov;
  innov.kind = InnovKind::StudentT;
  innov.dof = 5;
  const Eigen::MatrixXd X = gen_var1(coef, innov, 100000, 500, 17u);
  const double target = 1.0 / (1.0 - 0.16);
  CHECK(col_var(X, 0) == doctest::Approx(target).epsilon(0.03));
}

TEST_CASE("equicorrelated innovations") {
  InnovationSpec innov;
  innov.cov = InnovCov::Equicorrelated;
  innov.rho = 0.8;
  InnovationSampler sampler(innov, 4);
  Rng rng(19u);
  const int n = 100000;
  Eigen::MatrixXd draws(n, 4);
  Eigen::VectorXd v;
  for (int t = 0; t < n; ++t) {
    sampler.draw(rng, v);
    draws.row(t) = v;
  }
  const Eigen::MatrixXd centered = draws.rowwise() - draws.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / n;
  CHECK(cov(0, 0) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(cov(2, 3) == doctest::Approx(0.8).epsilon(0.03));
}

TEST_CASE("AR error stationary moments") {
  ArErrorSpec spec;
  spec.alpha = 0.6;
  const Eigen::VectorXd eps = gen_ar_error(spec, 100000, 500, 23u);
  const Eigen::VectorXd c = eps.array() - eps.mean();
  const double g0 = c.squaredNorm() / eps.size();
  double g1 = 0.0;
  for (int t = 0; t + 1 < eps.size(); ++t) g1 += c[t] * c[t + 1];
  g1 /= eps.size();
  CHECK(g0 == doctest::Approx(1.0 / 0.64).epsilon(0.02));
  CHECK(g1 == doctest::Approx(0.6 / 0.64).epsilon(0.02));

  ArErrorSpec strong;
  strong.alpha = 0.9;
  const Eigen::VectorXd eps9 = gen_ar_error(strong, 100000, 500, 29u);
  CHECK(lag1_autocorr(eps9) == doctest::Approx(0.9).epsilon(0.02));

  ArErrorSpec iid;
  iid.alpha = 0.0;
  const Eigen::VectorXd eps0 = gen_ar_error(iid, 100000, 0, 31u);
  CHECK(std::abs(lag1_autocorr(eps0)) < 0.02);
}

TEST_CASE("response assembly") {
  Eigen::MatrixXd X(3, 2);
  X << 1, 2, 3, 4, 5, 6;
  Eigen::VectorXd eps(3);
  eps << .1, .2, .3;

  SUBCASE("zero beta returns the errors") {
    const Eigen::VectorXd y = gen_response(X, Eigen::VectorXd::Zero(2), eps);
    CHECK((y - eps).norm() == 0.0);
  }
  SUBCASE("pure signal") {
    Eigen::MatrixXd X1(3, 1);
    X1 << 1, 2, 3;
    Eigen::VectorXd beta(1);
    beta << 2.0;
    const Eigen::VectorXd y = gen_response(X1, beta, Eigen::VectorXd::Zero(3));
    CHECK(y[0] == 2.0);
    CHECK(y[2] == 6.0);
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS_AS(gen_response(X, Eigen::VectorXd::Zero(3), eps), std::invalid_argument);
    CHECK_THROWS_AS(gen_response(X, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(4)),
                    std::invalid_argument);
  }
}

TEST_CASE("case-1 response variance decomposition") {
  SimDesign d = preset_design(PresetCase::C1, 20, PresetDist::Gaussian, {.4, .6}, 37u);
  d.n = 100000;
  const SimData data = generate(d, 0);
  const double g0x = 1.0 / (1.0 - 0.16);
  const double g0e = 1.0 / (1.0 - 0.36);
  const double expect = 6 * 0.25 * g0x + g0e;
  const Eigen::VectorXd yc = data.y.array() - data.y.mean();
  CHECK(yc.squaredNorm() / d.n == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("reproducibility and stream independence") {
  const SimDesign d = preset_design(PresetCase::C1, 50, PresetDist::T5, {.5, .8}, 41u);
  const SimData a = generate(d, 3);
  const SimData b = generate(d, 3);
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  const SimData c = generate(d, 4);
  CHECK((a.X - c.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("parameter validation") {
  VarCoefSpec unstable;
  unstable.kind = CoefKind::Explicit;
  unstable.p = 2;
  unstable.matrix.resize(2, 2);
  unstable.matrix << 1.1, 0, 0, 0.2;
  CHECK_THROWS_AS(VarCoefOp{unstable}, std::invalid_argument);

  InnovationSpec bad_t;
  bad_t.kind = InnovKind::StudentT;
  bad_t.dof = 2;
  CHECK_THROWS_AS(InnovationSampler(bad_t, 2), std::invalid_argument);

  ArErrorSpec bad_alpha;
  bad_alpha.alpha = 1.0;
  CHECK_THROWS_AS(gen_ar_error(bad_alpha, 10, 0, 1u), std::invalid_argument);
}

TEST_CASE("preset designs match their scenarios") {
  const SimDesign c1 = preset_design(PresetCase::C1, 1000, PresetDist::Gaussian, {.4, .6}, 1u);
  CHECK(c1.n == 200);
  CHECK(c1.true_support() == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(c1.beta[0] == 0.5);
  CHECK(c1.coef.kind == CoefKind::Diag);
  CHECK(c1.coef.value == 0.4);
  CHECK(c1.innov.cov == InnovCov::Identity);
  CHECK(c1.errors.alpha == 0.6);

  const SimDesign c2a = preset_design(PresetCase::C2A, 1000, PresetDist::Gaussian, {.4, .4}, 1u);
  CHECK(c2a.innov.cov == InnovCov::ToeplitzRho);
  CHECK(c2a.innov.rho == 0.3);
  CHECK(c2a.beta[1] == -1.0);

  const SimDesign c3b = preset_design(PresetCase::C3B, 1000, PresetDist::T5, {.4, .5}, 1u);
  CHECK(c3b.coef.kind == CoefKind::PowerToeplitz);
  CHECK(c3b.coef.value == 0.4);
  CHECK(c3b.innov.cov == InnovCov::Equicorrelated);
  CHECK(c3b.innov.rho == 0.8);
  CHECK(c3b.beta[5] == 0.75);
  CHECK(c3b.innov.kind == InnovKind::StudentT);

  // stability guard by power iteration on the preset coefficient operator
  const VarCoefOp op(c3b.coef);
  CHECK(op.spectral_radius() < 1.0);
  CHECK(op.spectral_radius() > 0.85);  // known to be close to but below 1
}
