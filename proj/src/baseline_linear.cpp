#include "nlvar/baseline_linear.hpp"

#include "nlvar/var_dynamics.hpp"

#include <sstream>

namespace nlvar {

VarCoefficients fit_ols(const TimeSeriesPanel& panel, int order, double ridge) {
  if (order < 1) throw ValidationError("fit_ols: order must be >= 1");
  if (ridge < 0.0) throw ValidationError("fit_ols: ridge must be >= 0");
  const int n = panel.n_nodes();
  const long t_len = panel.length();
  const long dim = static_cast<long>(n) * order;
  if (t_len <= dim + 1) {
    std::ostringstream msg;
    msg << "fit_ols: need more than N*P + 1 = " << (dim + 1) << " samples, got " << t_len;
    throw ValidationError(msg.str());
  }

  const long rows = t_len - order;
  Eigen::MatrixXd design(rows, dim);
  Eigen::MatrixXd response(rows, n);
  for (long t = order; t < t_len; ++t) {
    for (int q = 0; q < order; ++q) {
      design.block(t - order, static_cast<long>(q) * n, 1, n) = panel.data.row(t - 1 - q);
    }
    response.row(t - order) = panel.data.row(t);
  }

  Eigen::MatrixXd normal = design.transpose() * design;
  normal.diagonal().array() += ridge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double d_max = d.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || d_max <= 0.0 ||
      d.cwiseAbs().minCoeff() <= 1e-12 * d_max) {
    throw NumericalError(
        "fit_ols: normal equations are rank deficient; add a positive ridge term");
  }
  const Eigen::MatrixXd coeffs = ldlt.solve(design.transpose() * response);

  VarCoefficients var = VarCoefficients::zero(order, n);
  for (int q = 0; q < order; ++q) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        var.lags[static_cast<std::size_t>(q)](i, j) = coeffs(static_cast<long>(q) * n + j, i);
      }
    }
  }
  return var;
}

Eigen::VectorXd evaluate_linear_per_node(const VarCoefficients& var, const TimeSeriesPanel& panel) {
  validate(var);
  const int n = var.n_nodes();
  const int p = var.order();
  if (panel.n_nodes() != n) {
    throw ValidationError("evaluate_linear: panel has " + std::to_string(panel.n_nodes()) +
                          " nodes, model expects " + std::to_string(n));
  }
  const long t_len = panel.length();
  if (t_len <= p) {
    throw ValidationError("evaluate_linear: need more than order=" + std::to_string(p) +
                          " samples");
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd window(p, n);
  for (long t = p; t < t_len; ++t) {
    for (int q = 0; q < p; ++q) window.row(q) = panel.data.row(t - 1 - q);
    const Eigen::VectorXd pred = predict_latent(var, window);
    const Eigen::VectorXd diff = panel.data.row(t).transpose() - pred;
    acc += diff.cwiseProduct(diff);
  }
  return acc / static_cast<double>(t_len - p);
}

double evaluate_linear(const VarCoefficients& var, const TimeSeriesPanel& panel) {
  const Eigen::VectorXd per_node = evaluate_linear_per_node(var, panel);
  return per_node.sum() / static_cast<double>(per_node.size());
}

}  // namespace nlvar
