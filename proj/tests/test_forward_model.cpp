#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nlvar/forward_model.hpp"
#include "nlvar/rng.hpp"
#include "nlvar/var_dynamics.hpp"
#include "test_support.hpp"

#include <cmath>
#include <vector>

using namespace nlvar;
using test_support::random_feasible_map;

namespace {

NlVarModel random_model(RandomStream& rng, int n, int p, int m) {
  NlVarModel model;
  model.shape = ModelShape{n, p, m};
  for (int i = 0; i < n; ++i) model.maps.push_back(random_feasible_map(rng, m));
  model.var = VarCoefficients::zero(p, n);
  for (auto& lag : model.var.lags) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) lag(i, j) = 0.3 * rng.gaussian();
    }
  }
  return model;
}

Eigen::MatrixXd in_range_window(RandomStream& rng, const NlVarModel& model) {
  Eigen::MatrixXd window(model.shape.order, model.shape.n_nodes);
  for (int i = 0; i < model.shape.n_nodes; ++i) {
    const RangeBounds& r = model.maps[static_cast<std::size_t>(i)].range;
    for (int q = 0; q < model.shape.order; ++q) {
      window(q, i) = rng.uniform(r.lower + 0.1 * r.span(), r.upper - 0.1 * r.span());
    }
  }
  return window;
}

// Straight-line scalar re-implementation of the prediction step, sharing no
// code with the library: own logistic, own inverse search, explicit loops.
namespace oracle {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double map_value(const NodeMap& map, double y) {
  double acc = map.bias;
  for (int j = 0; j < map.units(); ++j) {
    acc += map.alpha[j] * logistic(map.weight[j] * y - map.shift[j]);
  }
  return acc;
}

double map_inverse(const NodeMap& map, double z) {
  double lo = -1e6;
  double hi = 1e6;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (map_value(map, mid) < z) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double step_cost(const NlVarModel& model, const Eigen::MatrixXd& window,
                 const Eigen::VectorXd& target) {
  const int n = model.shape.n_nodes;
  const int p = model.shape.order;
  std::vector<std::vector<double>> latent(static_cast<std::size_t>(p),
                                          std::vector<double>(static_cast<std::size_t>(n)));
  for (int q = 0; q < p; ++q) {
    for (int i = 0; i < n; ++i) {
      latent[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)] =
          map_inverse(model.maps[static_cast<std::size_t>(i)], window(q, i));
    }
  }
  double cost = 0.0;
  for (int i = 0; i < n; ++i) {
    double pred = 0.0;
    for (int q = 0; q < p; ++q) {
      for (int j = 0; j < n; ++j) {
        pred += model.var.lags[static_cast<std::size_t>(q)](i, j) *
                latent[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)];
      }
    }
    const double observed = map_value(model.maps[static_cast<std::size_t>(i)], pred);
    cost += (target[i] - observed) * (target[i] - observed);
  }
  return cost;
}

}  // namespace oracle

}  // namespace

TEST_CASE("forward_trace zero residual and non-negativity") {
  RandomStream rng(21);
  const NlVarModel model = random_model(rng, 3, 2, 4);
  const Eigen::MatrixXd window = in_range_window(rng, model);
  const Eigen::VectorXd rough_target = Eigen::VectorXd::Zero(3);
  const ForwardResult first = forward_trace(model, window, rough_target);
  CHECK(first.cost >= 0.0);

  const ForwardResult exact = forward_trace(model, window, first.trace.observed_pred);
  CHECK(exact.cost == 0.0);
}

TEST_CASE("forward_trace with zero coefficients collapses to f(0)") {
  RandomStream rng(22);
  NlVarModel model = random_model(rng, 1, 1, 3);
  model.var.lags[0].setZero();
  const Eigen::MatrixXd window = in_range_window(rng, model);
  Eigen::VectorXd target(1);
  target << 0.1;
  const ForwardResult result = forward_trace(model, window, target);
  const double expected_pred = eval_f(model.maps[0], 0.0);
  CHECK(result.trace.observed_pred[0] == doctest::Approx(expected_pred).epsilon(1e-14));
  CHECK(result.cost ==
        doctest::Approx((0.1 - expected_pred) * (0.1 - expected_pred)).epsilon(1e-12));
}

TEST_CASE("forward_trace matches the independent scalar oracle") {
  RandomStream rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const NlVarModel model = random_model(rng, 2, 2, 3);
    const Eigen::MatrixXd window = in_range_window(rng, model);
    Eigen::VectorXd target(2);
    target << rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8);
    const ForwardResult result = forward_trace(model, window, target);
    CHECK(result.cost == doctest::Approx(oracle::step_cost(model, window, target)).epsilon(1e-7));
  }
}

TEST_CASE("cost recomputed from the trace is bit-identical") {
  RandomStream rng(24);
  const NlVarModel model = random_model(rng, 3, 2, 4);
  const Eigen::MatrixXd window = in_range_window(rng, model);
  Eigen::VectorXd target(3);
  target << 0.2, -0.4, 0.0;
  const ForwardResult result = forward_trace(model, window, target);
  double recomputed = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double diff = target[i] - result.trace.observed_pred[i];
    recomputed += diff * diff;
  }
  CHECK(recomputed == result.cost);
}

TEST_CASE("predict_horizon") {
  RandomStream rng(25);
  SUBCASE("first row agrees with forward_trace") {
    const NlVarModel model = random_model(rng, 3, 2, 4);
    const Eigen::MatrixXd window = in_range_window(rng, model);
    const ForwardResult step = forward_trace(model, window, Eigen::VectorXd::Zero(3));
    const Eigen::MatrixXd horizon = predict_horizon(model, window, 1);
    for (int i = 0; i < 3; ++i) {
      CHECK(horizon(0, i) == doctest::Approx(step.trace.observed_pred[i]).epsilon(1e-12));
    }
  }
  SUBCASE("zero coefficients predict f(0) forever") {
    NlVarModel model = random_model(rng, 2, 1, 3);
    model.var.lags[0].setZero();
    const Eigen::MatrixXd window = in_range_window(rng, model);
    const Eigen::MatrixXd horizon = predict_horizon(model, window, 5);
    for (long h = 0; h < 5; ++h) {
      for (int i = 0; i < 2; ++i) {
        CHECK(horizon(h, i) ==
              doctest::Approx(eval_f(model.maps[static_cast<std::size_t>(i)], 0.0)).epsilon(1e-14));
      }
    }
  }
  SUBCASE("latent recursion is geometric for a scalar AR(1)") {
    NlVarModel model = random_model(rng, 1, 1, 3);
    model.var.lags[0](0, 0) = 0.5;
    Eigen::MatrixXd window(1, 1);
    window(0, 0) = eval_f(model.maps[0], 1.0);  // latent start 1
    const Eigen::MatrixXd horizon = predict_horizon(model, window, 3);
    CHECK(horizon(0, 0) == doctest::Approx(eval_f(model.maps[0], 0.5)).epsilon(1e-7));
    CHECK(horizon(1, 0) == doctest::Approx(eval_f(model.maps[0], 0.25)).epsilon(1e-7));
    CHECK(horizon(2, 0) == doctest::Approx(eval_f(model.maps[0], 0.125)).epsilon(1e-7));
  }
  SUBCASE("horizon must be positive") {
    const NlVarModel model = random_model(rng, 1, 1, 2);
    CHECK_THROWS_AS(predict_horizon(model, Eigen::MatrixXd::Zero(1, 1), 0), ValidationError);
  }
}

TEST_CASE("evaluate_mse") {
  RandomStream rng(26);
  SUBCASE("self-consistency on noiseless self-generated data") {
    NlVarModel gen = random_model(rng, 2, 2, 3);
    gen.var = stabilize(gen.var, 0.9);
    Eigen::MatrixXd init(2, 2);
    init << 0.8, -0.5, 0.3, 0.9;
    const TimeSeriesPanel latent = simulate_var(gen.var, InnovationSpec{0.0, 1}, 60, 0, init);
    TimeSeriesPanel observed;
    observed.role = SeriesRole::observed;
    observed.data.resize(latent.data.rows(), 2);
    for (long t = 0; t < latent.data.rows(); ++t) {
      for (int i = 0; i < 2; ++i) {
        observed.data(t, i) = eval_f(gen.maps[static_cast<std::size_t>(i)], latent.data(t, i));
      }
    }
    CHECK(evaluate_mse(gen, observed) <= 1e-12);
  }
  SUBCASE("zero coefficients reduce to the variance around f(0)") {
    NlVarModel model = random_model(rng, 2, 1, 3);
    model.var.lags[0].setZero();
    TimeSeriesPanel panel;
    panel.data.resize(40, 2);
    for (long t = 0; t < 40; ++t) {
      for (int i = 0; i < 2; ++i) {
        const RangeBounds& r = model.maps[static_cast<std::size_t>(i)].range;
        panel.data(t, i) = rng.uniform(r.lower + 0.2, r.upper - 0.2);
      }
    }
    double expected = 0.0;
    for (long t = 1; t < 40; ++t) {
      for (int i = 0; i < 2; ++i) {
        const double diff =
            panel.data(t, i) - eval_f(model.maps[static_cast<std::size_t>(i)], 0.0);
        expected += diff * diff;
      }
    }
    expected /= 2.0 * 39.0;
    CHECK(evaluate_mse(model, panel) == doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("single usable timestep") {
    const NlVarModel model = random_model(rng, 2, 2, 3);
    TimeSeriesPanel panel;
    panel.data.resize(3, 2);  // T = P + 1
    for (long t = 0; t < 3; ++t) {
      for (int i = 0; i < 2; ++i) panel.data(t, i) = rng.uniform(-0.7, 0.7);
    }
    Eigen::MatrixXd window(2, 2);
    window.row(0) = panel.data.row(1);
    window.row(1) = panel.data.row(0);
    const ForwardResult step = forward_trace(model, window, panel.data.row(2));
    CHECK(evaluate_mse(model, panel) == doctest::Approx(step.cost / 2.0).epsilon(1e-14));
  }
  SUBCASE("too-short panel rejected") {
    const NlVarModel model = random_model(rng, 2, 2, 3);
    TimeSeriesPanel panel;
    panel.data.setZero(2, 2);
    CHECK_THROWS_AS(evaluate_mse(model, panel), ValidationError);
  }
}
