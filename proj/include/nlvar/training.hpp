#pragma once

#include "nlvar/gradients.hpp"
#include "nlvar/types.hpp"

#include <functional>
#include <utility>

namespace nlvar {

enum class Optimizer { sgd, adam };

struct TrainConfig {
  int epochs = 300;
  int batch_size = 64;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double l1_weight = 0.0;  ///< sparsity penalty on the VAR coefficients
  double l2_weight = 0.0;  ///< ridge penalty on the VAR coefficients
  double test_fraction = 0.3;
  std::uint64_t seed = 0;
  double w_floor = 1e-6;  ///< strict-positivity floor for the slope weights
  double margin_fraction = kDefaultMarginFraction;
  double inversion_tol = kDefaultInversionTol;
};

void validate(const TrainConfig& config);

/// Strictly feasible starting point: alpha uniform at span/M, unit slopes,
/// shifts linearly spaced in [-2, 2], bias at the range floor; VAR entries
/// i.i.d. Gaussian with std 0.1/sqrt(N*P). Only the VAR draw uses the seed.
NlVarModel init_model(const ModelShape& shape, const std::vector<RangeBounds>& ranges,
                      std::uint64_t seed);

/// Euclidean projection of v onto the scaled simplex {x >= 0, sum x = total},
/// by the sort-and-threshold algorithm.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double total);

/// Projection onto the feasible set: slopes clamped to w_floor, alpha projected
/// onto the scaled simplex summing to the range span, bias reset to the range
/// floor. VAR coefficients are untouched.
NodeMap project_params(const NodeMap& map, double w_floor);
NlVarModel project_params(const NlVarModel& model, double w_floor);

/// cost + l1 * sum |a| + l2 * sum a^2 over the VAR coefficients only.
double loss_with_penalty(double cost, const NlVarModel& model, double l1_weight,
                         double l2_weight);

/// Chronological split: the first (1 - test_fraction) * T rows train, the rest
/// test. Both segments must keep more than `order` rows.
std::pair<TimeSeriesPanel, TimeSeriesPanel> split_panel(const TimeSeriesPanel& panel,
                                                        double test_fraction, int order);

struct FitResult {
  NlVarModel model;
  TrainReport report;
};

/// Called with the model after each optimizer step (post projection).
using StepObserver = std::function<void(const NlVarModel& model, int epoch, long step)>;

/// Constrained empirical-risk minimization: infers ranges from the full panel,
/// splits chronologically, initializes, and runs mini-batch SGD/Adam with the
/// hand-derived gradients, projecting onto the feasible set after every step.
/// Teacher-forced train and test MSE are recorded once per epoch.
/// Deterministic for a given (data, config).
FitResult fit(const TimeSeriesPanel& data, const ModelShape& shape, const TrainConfig& config,
              const StepObserver& observer = {});

}  // namespace nlvar
