#include "nlvar/forward_model.hpp"

#include "nlvar/var_dynamics.hpp"

#include <sstream>

namespace nlvar {

namespace {

void check_step_dims(const NlVarModel& model, const Eigen::MatrixXd& window,
                     const Eigen::VectorXd& target) {
  const int n = model.shape.n_nodes;
  const int p = model.shape.order;
  if (window.rows() != p || window.cols() != n || target.size() != n) {
    std::ostringstream msg;
    msg << "forward step: window is " << window.rows() << "x" << window.cols() << " and target has "
        << target.size() << " entries, expected " << p << "x" << n << " and " << n;
    throw ValidationError(msg.str());
  }
}

// Inverts one window column-by-column, tagging failures with the node index.
Eigen::MatrixXd invert_window(const NlVarModel& model, const Eigen::MatrixXd& window, double tol) {
  const int n = model.shape.n_nodes;
  const int p = model.shape.order;
  Eigen::MatrixXd latent(p, n);
  for (int i = 0; i < n; ++i) {
    for (int q = 0; q < p; ++q) {
      try {
        latent(q, i) = eval_g(model.maps[static_cast<std::size_t>(i)], window(q, i), tol);
      } catch (const NumericalError& err) {
        std::ostringstream msg;
        msg << "node " << i << ", lag " << (q + 1) << ": " << err.what();
        throw NumericalError(msg.str());
      }
    }
  }
  return latent;
}

}  // namespace

ForwardResult forward_trace(const NlVarModel& model, const Eigen::MatrixXd& window,
                            const Eigen::VectorXd& target, double inversion_tol) {
  check_step_dims(model, window, target);
  const int n = model.shape.n_nodes;

  ForwardResult result;
  result.trace.latent_history = invert_window(model, window, inversion_tol);
  result.trace.latent_pred = predict_latent(model.var, result.trace.latent_history);
  result.trace.observed_pred.resize(n);
  for (int i = 0; i < n; ++i) {
    result.trace.observed_pred[i] =
        eval_f(model.maps[static_cast<std::size_t>(i)], result.trace.latent_pred[i]);
  }
  double cost = 0.0;
  for (int i = 0; i < n; ++i) {
    const double diff = target[i] - result.trace.observed_pred[i];
    cost += diff * diff;
  }
  result.cost = cost;
  return result;
}

Eigen::MatrixXd predict_horizon(const NlVarModel& model, const Eigen::MatrixXd& window,
                                long horizon, double inversion_tol) {
  if (horizon < 1) throw ValidationError("predict_horizon: horizon must be >= 1");
  check_step_dims(model, window, Eigen::VectorXd::Zero(model.shape.n_nodes));
  const int n = model.shape.n_nodes;
  const int p = model.shape.order;

  Eigen::MatrixXd latent = invert_window(model, window, inversion_tol);
  Eigen::MatrixXd out(horizon, n);
  for (long h = 0; h < horizon; ++h) {
    const Eigen::VectorXd pred = predict_latent(model.var, latent);
    for (int q = p - 1; q > 0; --q) latent.row(q) = latent.row(q - 1);
    latent.row(0) = pred.transpose();
    for (int i = 0; i < n; ++i) {
      out(h, i) = eval_f(model.maps[static_cast<std::size_t>(i)], pred[i]);
    }
  }
  return out;
}

Eigen::VectorXd evaluate_node_mse(const NlVarModel& model, const TimeSeriesPanel& panel,
                                  double inversion_tol) {
  if (panel.role != SeriesRole::observed) {
    throw ValidationError("evaluate_mse: panel must hold observed series");
  }
  const int n = model.shape.n_nodes;
  const int p = model.shape.order;
  if (panel.n_nodes() != n) {
    throw ValidationError("evaluate_mse: panel has " + std::to_string(panel.n_nodes()) +
                          " nodes, model expects " + std::to_string(n));
  }
  const long t_len = panel.length();
  if (t_len <= p) {
    throw ValidationError("evaluate_mse: need more than order=" + std::to_string(p) + " samples, got " +
                          std::to_string(t_len));
  }

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd window(p, n);
  for (long t = p; t < t_len; ++t) {
    for (int q = 0; q < p; ++q) window.row(q) = panel.data.row(t - 1 - q);
    const ForwardResult step = forward_trace(model, window, panel.data.row(t), inversion_tol);
    const Eigen::VectorXd diff = panel.data.row(t).transpose() - step.trace.observed_pred;
    acc += diff.cwiseProduct(diff);
  }
  return acc / static_cast<double>(t_len - p);
}

double evaluate_mse(const NlVarModel& model, const TimeSeriesPanel& panel, double inversion_tol) {
  const Eigen::VectorXd per_node = evaluate_node_mse(model, panel, inversion_tol);
  return per_node.sum() / static_cast<double>(per_node.size());
}

}  // namespace nlvar
