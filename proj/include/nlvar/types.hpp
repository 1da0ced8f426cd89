#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlvar {

/// Invalid inputs, malformed files, broken preconditions. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not complete: failed inversion, unstable
/// process, near-singular derivative, rank deficiency. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimensions of a nonlinear VAR model: N observed nodes, P lags in the
/// latent recursion, M sigmoid units in each node map.
struct ModelShape {
  int n_nodes = 1;
  int order = 1;
  int n_units = 1;
};

void validate(const ModelShape& shape);

/// Lag-indexed coefficient matrices of the latent linear recursion.
/// lags[p] is N x N and applies to the state p+1 steps in the past;
/// entry (i, j) couples node j into node i.
struct VarCoefficients {
  std::vector<Eigen::MatrixXd> lags;

  int order() const { return static_cast<int>(lags.size()); }
  int n_nodes() const { return lags.empty() ? 0 : static_cast<int>(lags.front().rows()); }

  static VarCoefficients zero(int order, int n_nodes);
};

void validate(const VarCoefficients& var);

/// Open interval (lower, upper) that a node map saturates into.
struct RangeBounds {
  double lower = 0.0;
  double upper = 1.0;

  double span() const { return upper - lower; }
};

void validate(const RangeBounds& bounds, int node_index = -1);

/// Parameters of one node's monotone observation map
///   f(y) = sum_j alpha[j] * sigmoid(weight[j] * y - shift[j]) + bias.
/// A feasible map has alpha >= 0, weight > 0, sum(alpha) == range span and
/// bias == range.lower, so the image of f is exactly (lower, upper).
struct NodeMap {
  Eigen::VectorXd alpha;   ///< unit amplitudes, length M
  Eigen::VectorXd weight;  ///< unit slopes, length M
  Eigen::VectorXd shift;   ///< unit offsets, length M
  double bias = 0.0;
  RangeBounds range;

  int units() const { return static_cast<int>(alpha.size()); }
};

struct NlVarModel {
  ModelShape shape;
  VarCoefficients var;
  std::vector<NodeMap> maps;
};

enum class SeriesRole { observed, latent };

/// T x N panel of real-valued samples; row t is the sample at time t.
struct TimeSeriesPanel {
  Eigen::MatrixXd data;
  SeriesRole role = SeriesRole::observed;

  long length() const { return data.rows(); }
  int n_nodes() const { return static_cast<int>(data.cols()); }
};

/// Intermediate quantities of one observed-space prediction step, kept so
/// the gradient engine can reuse the inversions.
struct ForwardTrace {
  Eigen::MatrixXd latent_history;  ///< P x N, row p-1 holds g(z[t-p])
  Eigen::VectorXd latent_pred;     ///< N, latent one-step prediction
  Eigen::VectorXd observed_pred;   ///< N, mapped back through f
};

struct ModelDigest {
  double final_train_mse = 0.0;
  double final_test_mse = 0.0;
  int best_epoch = -1;  ///< epoch with lowest test MSE; -1 when no epochs ran
  double best_test_mse = 0.0;
};

struct TrainReport {
  int epochs = 0;
  std::vector<double> train_mse;
  std::vector<double> test_mse;
  ModelDigest final_model_digest;
};

inline constexpr double kDefaultMarginFraction = 0.05;

/// Per-node operation intervals from observed data: for a column with min m,
/// max M and span s (a constant column counts as span 1), returns
/// (m - margin_fraction * s, M + margin_fraction * s). The result always has
/// lower < upper.
std::vector<RangeBounds> infer_ranges(const TimeSeriesPanel& panel,
                                      double margin_fraction = kDefaultMarginFraction);

/// Largest violation of the feasibility constraints of one node map:
/// alpha >= 0, weight >= w_floor, sum(alpha) == span, bias == lower.
double feasibility_violation(const NodeMap& map, double w_floor = 0.0);

/// Max over nodes of feasibility_violation.
double feasibility_violation(const NlVarModel& model, double w_floor = 0.0);

/// Shape consistency plus per-node feasibility; throws ValidationError naming
/// the first violated constraint.
void check_feasible(const NlVarModel& model, double tol = 1e-9);

}  // namespace nlvar
