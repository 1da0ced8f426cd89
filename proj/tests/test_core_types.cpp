#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nlvar/rng.hpp"
#include "nlvar/types.hpp"

#include <cmath>
#include <limits>

using namespace nlvar;

namespace {
TimeSeriesPanel panel_from_column(std::initializer_list<double> values) {
  TimeSeriesPanel panel;
  panel.data.resize(static_cast<long>(values.size()), 1);
  long t = 0;
  for (double v : values) panel.data(t++, 0) = v;
  return panel;
}
}  // namespace

TEST_CASE("model shape validation") {
  CHECK_NOTHROW(validate(ModelShape{1, 1, 1}));
  CHECK_THROWS_AS(validate(ModelShape{0, 1, 1}), ValidationError);
  CHECK_THROWS_AS(validate(ModelShape{2, 0, 3}), ValidationError);
  CHECK_THROWS_AS(validate(ModelShape{2, 1, -4}), ValidationError);
}

TEST_CASE("infer_ranges on a simple column") {
  const auto panel = panel_from_column({0.0, 1.0, 2.0});

  SUBCASE("zero margin returns the min/max") {
    const auto ranges = infer_ranges(panel, 0.0);
    REQUIRE(ranges.size() == 1);
    CHECK(ranges[0].lower == 0.0);
    CHECK(ranges[0].upper == 2.0);
  }
  SUBCASE("five percent margin of span 2") {
    const auto ranges = infer_ranges(panel, 0.05);
    CHECK(ranges[0].lower == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(ranges[0].upper == doctest::Approx(2.1).epsilon(1e-12));
  }
}

TEST_CASE("infer_ranges substitutes span 1 for a constant column") {
  // degenerate-span rule: span 0 -> 1, then +/- 0.05
  const auto panel = panel_from_column({3.0, 3.0, 3.0});
  const auto ranges = infer_ranges(panel, 0.05);
  CHECK(ranges[0].lower == doctest::Approx(2.95).epsilon(1e-12));
  CHECK(ranges[0].upper == doctest::Approx(3.05).epsilon(1e-12));
}

TEST_CASE("infer_ranges keeps lower < upper even for constant column with zero margin") {
  const auto panel = panel_from_column({3.0, 3.0, 3.0});
  const auto ranges = infer_ranges(panel, 0.0);
  CHECK(ranges[0].lower < ranges[0].upper);
}

TEST_CASE("infer_ranges rejects non-finite data naming the node") {
  TimeSeriesPanel panel;
  panel.data.setZero(4, 3);
  panel.data(2, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    infer_ranges(panel, 0.05);
    FAIL("expected ValidationError");
  } catch (const ValidationError& err) {
    CHECK(std::string(err.what()).find("node 1") != std::string::npos);
  }
}

TEST_CASE("infer_ranges rejects latent panels and bad margins") {
  auto panel = panel_from_column({0.0, 1.0});
  panel.role = SeriesRole::latent;
  CHECK_THROWS_AS(infer_ranges(panel, 0.05), ValidationError);
  panel.role = SeriesRole::observed;
  CHECK_THROWS_AS(infer_ranges(panel, -0.1), ValidationError);
  CHECK_THROWS_AS(infer_ranges(panel_from_column({1.0}), 0.05), ValidationError);
}

TEST_CASE("infer_ranges property: samples inside the closed interval, lower < upper") {
  RandomStream rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    TimeSeriesPanel panel;
    const long t_len = 2 + static_cast<long>(rng.below(40));
    const int n = 1 + static_cast<int>(rng.below(5));
    panel.data.resize(t_len, n);
    for (long t = 0; t < t_len; ++t) {
      for (int i = 0; i < n; ++i) panel.data(t, i) = rng.uniform(-50.0, 50.0);
    }
    const double margin = rng.uniform(0.001, 0.2);
    const auto ranges = infer_ranges(panel, margin);
    for (int i = 0; i < n; ++i) {
      CHECK(ranges[static_cast<std::size_t>(i)].lower < ranges[static_cast<std::size_t>(i)].upper);
      CHECK(panel.data.col(i).minCoeff() >= ranges[static_cast<std::size_t>(i)].lower);
      CHECK(panel.data.col(i).maxCoeff() <= ranges[static_cast<std::size_t>(i)].upper);
    }
  }
}

TEST_CASE("feasibility violations are reported by constraint") {
  NlVarModel model;
  model.shape = ModelShape{1, 1, 2};
  model.var = VarCoefficients::zero(1, 1);
  NodeMap map;
  map.range = RangeBounds{0.0, 1.0};
  map.alpha = Eigen::Vector2d(0.5, 0.5);
  map.weight = Eigen::Vector2d(1.0, 1.0);
  map.shift = Eigen::Vector2d(0.0, 0.5);
  map.bias = 0.0;
  model.maps.push_back(map);

  CHECK_NOTHROW(check_feasible(model));
  CHECK(feasibility_violation(model) == doctest::Approx(0.0));

  SUBCASE("alpha sum off") {
    model.maps[0].alpha[0] = 0.9;
    CHECK(feasibility_violation(model) == doctest::Approx(0.4));
    try {
      check_feasible(model);
      FAIL("expected ValidationError");
    } catch (const ValidationError& err) {
      CHECK(std::string(err.what()).find("sum(alpha)") != std::string::npos);
    }
  }
  SUBCASE("negative alpha") {
    model.maps[0].alpha = Eigen::Vector2d(-0.1, 1.1);
    CHECK_THROWS_AS(check_feasible(model), ValidationError);
  }
  SUBCASE("bias off the range floor") {
    model.maps[0].bias = 0.25;
    try {
      check_feasible(model);
      FAIL("expected ValidationError");
    } catch (const ValidationError& err) {
      CHECK(std::string(err.what()).find("bias") != std::string::npos);
    }
  }
  SUBCASE("w_floor aware violation") {
    CHECK(feasibility_violation(model, 2.0) == doctest::Approx(1.0));
  }
}
