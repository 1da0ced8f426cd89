#include "nlvar/training.hpp"

#include "nlvar/forward_model.hpp"
#include "nlvar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nlvar {

void validate(const TrainConfig& config) {
  if (config.epochs < 0) throw ValidationError("train config: epochs must be >= 0");
  if (config.batch_size < 1) throw ValidationError("train config: batch_size must be >= 1");
  if (!(config.learning_rate >= 0.0)) throw ValidationError("train config: learning_rate must be >= 0");
  if (!(config.adam_beta1 >= 0.0 && config.adam_beta1 < 1.0) ||
      !(config.adam_beta2 >= 0.0 && config.adam_beta2 < 1.0)) {
    throw ValidationError("train config: adam betas must lie in [0, 1)");
  }
  if (!(config.adam_epsilon > 0.0)) throw ValidationError("train config: adam_epsilon must be > 0");
  if (!(config.l1_weight >= 0.0 && config.l2_weight >= 0.0)) {
    throw ValidationError("train config: penalty weights must be >= 0");
  }
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw ValidationError("train config: test_fraction must lie in (0, 1)");
  }
  if (!(config.w_floor > 0.0)) throw ValidationError("train config: w_floor must be > 0");
  if (!(config.margin_fraction >= 0.0)) {
    throw ValidationError("train config: margin_fraction must be >= 0");
  }
  if (!(config.inversion_tol > 0.0)) throw ValidationError("train config: inversion_tol must be > 0");
}

NlVarModel init_model(const ModelShape& shape, const std::vector<RangeBounds>& ranges,
                      std::uint64_t seed) {
  validate(shape);
  if (static_cast<int>(ranges.size()) != shape.n_nodes) {
    throw ValidationError("init_model: need one range per node");
  }
  NlVarModel model;
  model.shape = shape;
  const int m = shape.n_units;
  model.maps.reserve(static_cast<std::size_t>(shape.n_nodes));
  for (int i = 0; i < shape.n_nodes; ++i) {
    validate(ranges[static_cast<std::size_t>(i)], i);
    NodeMap map;
    map.range = ranges[static_cast<std::size_t>(i)];
    map.alpha = Eigen::VectorXd::Constant(m, map.range.span() / m);
    map.weight = Eigen::VectorXd::Ones(m);
    map.shift.resize(m);
    for (int j = 0; j < m; ++j) {
      map.shift[j] = m == 1 ? 0.0 : -2.0 + 4.0 * j / (m - 1.0);
    }
    map.bias = map.range.lower;
    model.maps.push_back(std::move(map));
  }
  model.var = VarCoefficients::zero(shape.order, shape.n_nodes);
  RandomStream rng(seed);
  const double coeff_std = 0.1 / std::sqrt(static_cast<double>(shape.n_nodes * shape.order));
  for (auto& lag : model.var.lags) {
    for (int i = 0; i < shape.n_nodes; ++i) {
      for (int j = 0; j < shape.n_nodes; ++j) lag(i, j) = coeff_std * rng.gaussian();
    }
  }
  return model;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double total) {
  if (!(total > 0.0)) throw ValidationError("project_simplex: total must be positive");
  const int m = static_cast<int>(v.size());
  std::vector<double> sorted(v.data(), v.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (int j = 0; j < m; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - total) / (j + 1.0);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) threshold = candidate;
  }
  return v.unaryExpr([threshold](double x) { return std::max(x - threshold, 0.0); });
}

NodeMap project_params(const NodeMap& map, double w_floor) {
  NodeMap out = map;
  out.weight = out.weight.cwiseMax(w_floor);
  out.alpha = project_simplex(out.alpha, out.range.span());
  out.bias = out.range.lower;
  return out;
}

NlVarModel project_params(const NlVarModel& model, double w_floor) {
  NlVarModel out = model;
  for (auto& map : out.maps) map = project_params(map, w_floor);
  return out;
}

double loss_with_penalty(double cost, const NlVarModel& model, double l1_weight, double l2_weight) {
  if (l1_weight < 0.0 || l2_weight < 0.0) {
    throw ValidationError("loss_with_penalty: penalty weights must be >= 0");
  }
  double l1 = 0.0;
  double l2 = 0.0;
  for (const auto& lag : model.var.lags) {
    l1 += lag.cwiseAbs().sum();
    l2 += lag.squaredNorm();
  }
  return cost + l1_weight * l1 + l2_weight * l2;
}

std::pair<TimeSeriesPanel, TimeSeriesPanel> split_panel(const TimeSeriesPanel& panel,
                                                        double test_fraction, int order) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("split_panel: test_fraction must lie in (0, 1)");
  }
  const long t_len = panel.length();
  const long train_len = std::lround((1.0 - test_fraction) * static_cast<double>(t_len));
  const long test_len = t_len - train_len;
  if (train_len <= order || test_len <= order) {
    std::ostringstream msg;
    msg << "split_panel: segments of " << train_len << " train / " << test_len
        << " test rows are too short for order " << order;
    throw ValidationError(msg.str());
  }
  TimeSeriesPanel train{panel.data.topRows(train_len), panel.role};
  TimeSeriesPanel test{panel.data.bottomRows(test_len), panel.role};
  return {std::move(train), std::move(test)};
}

namespace {

// Optimizer state mirroring the free parameters (VAR tensor and per-node
// alpha/weight/shift; the bias is pinned by the projection).
struct AdamState {
  std::vector<Eigen::MatrixXd> var_m, var_v;
  std::vector<Eigen::VectorXd> alpha_m, alpha_v, weight_m, weight_v, shift_m, shift_v;
  long step = 0;

  explicit AdamState(const ModelShape& shape) {
    var_m.assign(static_cast<std::size_t>(shape.order),
                 Eigen::MatrixXd::Zero(shape.n_nodes, shape.n_nodes));
    var_v = var_m;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(shape.n_units);
    alpha_m.assign(static_cast<std::size_t>(shape.n_nodes), zero);
    alpha_v = weight_m = weight_v = shift_m = shift_v = alpha_m;
  }
};

template <typename Array>
void adam_update(Array& param, Array& m, Array& v, const Array& grad, const TrainConfig& cfg,
                 double bias1, double bias2) {
  m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
  v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
  const Array m_hat = m / bias1;
  const Array v_hat = v / bias2;
  param -= cfg.learning_rate *
           m_hat.cwiseQuotient(v_hat.cwiseSqrt() + Array::Constant(v_hat.rows(), v_hat.cols(),
                                                                   cfg.adam_epsilon));
}

void apply_update(NlVarModel& model, const ModelGradient& grad, AdamState& state,
                  const TrainConfig& cfg) {
  if (cfg.optimizer == Optimizer::sgd) {
    for (std::size_t q = 0; q < model.var.lags.size(); ++q) {
      model.var.lags[q] -= cfg.learning_rate * grad.var[q];
    }
    for (std::size_t i = 0; i < model.maps.size(); ++i) {
      model.maps[i].alpha -= cfg.learning_rate * grad.theta[i].d_alpha;
      model.maps[i].weight -= cfg.learning_rate * grad.theta[i].d_weight;
      model.maps[i].shift -= cfg.learning_rate * grad.theta[i].d_shift;
    }
    return;
  }
  ++state.step;
  const double bias1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state.step));
  for (std::size_t q = 0; q < model.var.lags.size(); ++q) {
    adam_update(model.var.lags[q], state.var_m[q], state.var_v[q], grad.var[q], cfg, bias1, bias2);
  }
  for (std::size_t i = 0; i < model.maps.size(); ++i) {
    adam_update(model.maps[i].alpha, state.alpha_m[i], state.alpha_v[i], grad.theta[i].d_alpha,
                cfg, bias1, bias2);
    adam_update(model.maps[i].weight, state.weight_m[i], state.weight_v[i], grad.theta[i].d_weight,
                cfg, bias1, bias2);
    adam_update(model.maps[i].shift, state.shift_m[i], state.shift_v[i], grad.theta[i].d_shift,
                cfg, bias1, bias2);
  }
}

void add_penalty_gradient(ModelGradient& grad, const NlVarModel& model, const TrainConfig& cfg) {
  if (cfg.l1_weight == 0.0 && cfg.l2_weight == 0.0) return;
  for (std::size_t q = 0; q < grad.var.size(); ++q) {
    const Eigen::MatrixXd& a = model.var.lags[q];
    if (cfg.l1_weight > 0.0) {
      grad.var[q] += cfg.l1_weight * a.unaryExpr([](double x) {
        return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      });
    }
    if (cfg.l2_weight > 0.0) grad.var[q] += 2.0 * cfg.l2_weight * a;
  }
}

void shuffle_indices(std::vector<long>& indices, RandomStream& rng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(indices[i - 1], indices[j]);
  }
}

}  // namespace

FitResult fit(const TimeSeriesPanel& data, const ModelShape& shape, const TrainConfig& config,
              const StepObserver& observer) {
  validate(shape);
  validate(config);
  if (data.role != SeriesRole::observed) throw ValidationError("fit: panel must hold observed series");
  if (data.n_nodes() != shape.n_nodes) {
    throw ValidationError("fit: panel has " + std::to_string(data.n_nodes()) +
                          " nodes, shape says " + std::to_string(shape.n_nodes));
  }
  if (data.length() <= shape.order + 1) {
    throw ValidationError("fit: need more than order + 1 samples");
  }

  const std::vector<RangeBounds> ranges = infer_ranges(data, config.margin_fraction);
  auto [train, test] = split_panel(data, config.test_fraction, shape.order);

  NlVarModel model = init_model(shape, ranges, config.seed);
  AdamState state(shape);
  RandomStream shuffler(config.seed ^ 0x9e3779b97f4a7c15ULL);

  const int p = shape.order;
  std::vector<long> indices(static_cast<std::size_t>(train.length() - p));
  std::iota(indices.begin(), indices.end(), static_cast<long>(p));

  TrainReport report;
  report.epochs = config.epochs;
  report.train_mse.reserve(static_cast<std::size_t>(config.epochs));
  report.test_mse.reserve(static_cast<std::size_t>(config.epochs));

  std::vector<Eigen::MatrixXd> windows;
  std::vector<Eigen::VectorXd> targets;
  long global_step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_indices(indices, shuffler);
    for (std::size_t start = 0; start < indices.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(indices.size(), start + static_cast<std::size_t>(config.batch_size));
      windows.clear();
      targets.clear();
      for (std::size_t b = start; b < stop; ++b) {
        const long t = indices[b];
        Eigen::MatrixXd window(p, shape.n_nodes);
        for (int q = 0; q < p; ++q) window.row(q) = train.data.row(t - 1 - q);
        windows.push_back(std::move(window));
        targets.emplace_back(train.data.row(t).transpose());
      }
      ModelGradient grad;
      try {
        grad = grad_batch(model, windows, targets, config.inversion_tol);
      } catch (const NumericalError& err) {
        std::ostringstream msg;
        msg << "fit: epoch " << epoch << ", batch starting at sample " << start << ": "
            << err.what();
        throw NumericalError(msg.str());
      }
      add_penalty_gradient(grad, model, config);
      apply_update(model, grad, state, config);
      model = project_params(model, config.w_floor);
      if (observer) observer(model, epoch, global_step);
      ++global_step;
    }
    report.train_mse.push_back(evaluate_mse(model, train, config.inversion_tol));
    report.test_mse.push_back(evaluate_mse(model, test, config.inversion_tol));
  }

  if (config.epochs > 0) {
    report.final_model_digest.final_train_mse = report.train_mse.back();
    report.final_model_digest.final_test_mse = report.test_mse.back();
    const auto best = std::min_element(report.test_mse.begin(), report.test_mse.end());
    report.final_model_digest.best_epoch = static_cast<int>(best - report.test_mse.begin());
    report.final_model_digest.best_test_mse = *best;
  }

  return FitResult{std::move(model), std::move(report)};
}

}  // namespace nlvar
