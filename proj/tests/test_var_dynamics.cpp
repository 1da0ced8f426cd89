#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nlvar/rng.hpp"
#include "nlvar/var_dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace nlvar;

namespace {

VarCoefficients random_var(RandomStream& rng, int n, int p, double scale) {
  VarCoefficients var = VarCoefficients::zero(p, n);
  for (auto& lag : var.lags) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) lag(i, j) = scale * rng.gaussian();
    }
  }
  return var;
}

// dense eigensolver on the full companion matrix
double radius_oracle(const VarCoefficients& var) {
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion_matrix(var));
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("predict_latent basics") {
  SUBCASE("zero coefficients") {
    const VarCoefficients var = VarCoefficients::zero(2, 3);
    const Eigen::MatrixXd history = Eigen::MatrixXd::Random(2, 3);
    CHECK(predict_latent(var, history).isZero(0.0));
  }
  SUBCASE("identity propagates the lag-1 row") {
    VarCoefficients var = VarCoefficients::zero(1, 3);
    var.lags[0] = Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd history(1, 3);
    history << 0.3, -1.2, 5.0;
    const Eigen::VectorXd out = predict_latent(var, history);
    CHECK(out.isApprox(history.row(0).transpose(), 1e-15));
  }
  SUBCASE("matches a hand-looped double sum") {
    RandomStream rng(11);
    VarCoefficients var = random_var(rng, 2, 2, 0.7);
    Eigen::MatrixXd history(2, 2);
    history << 0.5, -0.25, 1.5, 2.0;
    const Eigen::VectorXd out = predict_latent(var, history);
    for (int i = 0; i < 2; ++i) {
      double expected = 0.0;
      for (int p = 0; p < 2; ++p) {
        for (int j = 0; j < 2; ++j) expected += var.lags[static_cast<std::size_t>(p)](i, j) * history(p, j);
      }
      CHECK(out[i] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("dimension mismatch") {
    const VarCoefficients var = VarCoefficients::zero(2, 3);
    CHECK_THROWS_AS(predict_latent(var, Eigen::MatrixXd::Zero(3, 3)), ValidationError);
  }
}

TEST_CASE("simulate_var basics") {
  SUBCASE("zero coefficients, zero noise") {
    const VarCoefficients var = VarCoefficients::zero(1, 2);
    const auto panel = simulate_var(var, InnovationSpec{0.0, 1}, 50, 10);
    CHECK(panel.role == SeriesRole::latent);
    CHECK(panel.length() == 50);
    CHECK(panel.data.isZero(0.0));
  }
  SUBCASE("geometric decay from a seeded start") {
    VarCoefficients var = VarCoefficients::zero(1, 1);
    var.lags[0](0, 0) = 0.5;
    Eigen::MatrixXd init(1, 1);
    init(0, 0) = 1.0;
    const auto panel = simulate_var(var, InnovationSpec{0.0, 1}, 10, 0, init);
    for (long t = 0; t < 10; ++t) {
      CHECK(panel.data(t, 0) == std::pow(0.5, static_cast<double>(t)));
    }
  }
  SUBCASE("AR(1) stationary variance") {
    VarCoefficients var = VarCoefficients::zero(1, 1);
    var.lags[0](0, 0) = 0.5;
    const auto panel = simulate_var(var, InnovationSpec{1.0, 99}, 200000);
    const double mean = panel.data.col(0).mean();
    const double variance = (panel.data.col(0).array() - mean).square().sum() /
                            static_cast<double>(panel.length() - 1);
    // sigma^2 / (1 - a^2) = 1 / 0.75
    CHECK(variance == doctest::Approx(1.0 / 0.75).epsilon(0.02));
  }
  SUBCASE("unstable coefficients rejected") {
    VarCoefficients var = VarCoefficients::zero(1, 1);
    var.lags[0](0, 0) = 1.5;
    CHECK_THROWS_AS(simulate_var(var, InnovationSpec{1.0, 1}, 10), NumericalError);
  }
  SUBCASE("bit-identical for identical seeds") {
    RandomStream rng(12);
    const VarCoefficients var = stabilize(random_var(rng, 3, 2, 1.0), 0.9);
    const auto a = simulate_var(var, InnovationSpec{0.3, 1234}, 500);
    const auto b = simulate_var(var, InnovationSpec{0.3, 1234}, 500);
    CHECK(a.data == b.data);
    const auto c = simulate_var(var, InnovationSpec{0.3, 1235}, 500);
    CHECK(a.data != c.data);
  }
}

TEST_CASE("companion_spectral_radius") {
  SUBCASE("zero tensor") {
    CHECK(companion_spectral_radius(VarCoefficients::zero(2, 3)) == 0.0);
  }
  SUBCASE("scaled identity") {
    VarCoefficients var = VarCoefficients::zero(1, 4);
    var.lags[0] = 0.5 * Eigen::MatrixXd::Identity(4, 4);
    CHECK(companion_spectral_radius(var) == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("matches the dense eigensolver") {
    RandomStream rng(13);
    for (int trial = 0; trial < 25; ++trial) {
      const VarCoefficients var = random_var(rng, 3, 2, 0.6);
      const double mine = companion_spectral_radius(var);
      const double oracle = radius_oracle(var);
      CHECK(mine == doctest::Approx(oracle).epsilon(1e-7));
    }
  }
  SUBCASE("nilpotent structure gives radius zero") {
    VarCoefficients var = VarCoefficients::zero(1, 2);
    var.lags[0](0, 1) = 100.0;  // strictly upper triangular
    CHECK(companion_spectral_radius(var) == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("stabilize") {
  SUBCASE("scaled identity lands on the target") {
    VarCoefficients var = VarCoefficients::zero(1, 3);
    var.lags[0] = 2.0 * Eigen::MatrixXd::Identity(3, 3);
    const VarCoefficients out = stabilize(var, 0.5);
    CHECK(out.lags[0].isApprox(0.5 * Eigen::MatrixXd::Identity(3, 3), 1e-12));
  }
  SUBCASE("idempotent at the target radius") {
    RandomStream rng(14);
    const VarCoefficients var = stabilize(random_var(rng, 3, 2, 1.0), 0.9);
    const VarCoefficients again = stabilize(var, 0.9);
    for (std::size_t p = 0; p < var.lags.size(); ++p) {
      CHECK(again.lags[p].isApprox(var.lags[p], 1e-9));
    }
  }
  SUBCASE("random instances against the eigensolver oracle") {
    RandomStream rng(15);
    for (int trial = 0; trial < 10; ++trial) {
      const VarCoefficients var = random_var(rng, 4, 3, 1.0);
      const VarCoefficients out = stabilize(var, 0.95);
      CHECK(radius_oracle(out) == doctest::Approx(0.95).epsilon(1e-6));
    }
  }
  SUBCASE("zero radius returned unchanged") {
    const VarCoefficients var = VarCoefficients::zero(2, 2);
    const VarCoefficients out = stabilize(var, 0.5);
    CHECK(out.lags[0] == var.lags[0]);
    CHECK(out.lags[1] == var.lags[1]);
  }
  SUBCASE("invalid target rejected") {
    CHECK_THROWS_AS(stabilize(VarCoefficients::zero(1, 1), 1.5), ValidationError);
  }
}
