#include "nlvar/gradients.hpp"

#include "nlvar/detail/scalar_map.hpp"
#include "nlvar/rng.hpp"

#include <algorithm>
#include <cmath>

namespace nlvar {

namespace {
// The reference trace for gradient checks inverts far below the default
// tolerance so both comparison sides see the same latent points.
constexpr double kFdInversionTol = 1e-15;
}  // namespace

ModelGradient ModelGradient::zero(const ModelShape& shape) {
  ModelGradient g;
  g.var.assign(static_cast<std::size_t>(shape.order),
               Eigen::MatrixXd::Zero(shape.n_nodes, shape.n_nodes));
  g.theta.assign(static_cast<std::size_t>(shape.n_nodes), ThetaGradient::zero(shape.n_units));
  return g;
}

ModelGradient& ModelGradient::operator+=(const ModelGradient& other) {
  for (std::size_t p = 0; p < var.size(); ++p) var[p] += other.var[p];
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += other.theta[i];
  return *this;
}

ModelGradient& ModelGradient::operator*=(double factor) {
  for (auto& lag : var) lag *= factor;
  for (auto& g : theta) g *= factor;
  return *this;
}

ModelGradient grad_timestep(const NlVarModel& model, const Eigen::MatrixXd& window,
                            const Eigen::VectorXd& target, const ForwardTrace& trace) {
  (void)window;
  const int n = model.shape.n_nodes;
  const int p = model.shape.order;

  const Eigen::VectorXd residual_scale = 2.0 * (trace.observed_pred - target);
  Eigen::VectorXd slope_at_pred(n);
  for (int i = 0; i < n; ++i) {
    slope_at_pred[i] =
        eval_f_prime(model.maps[static_cast<std::size_t>(i)], trace.latent_pred[i]);
  }
  const Eigen::VectorXd weighted = residual_scale.cwiseProduct(slope_at_pred);

  ModelGradient grad = ModelGradient::zero(model.shape);
  for (int q = 0; q < p; ++q) {
    grad.var[static_cast<std::size_t>(q)] = weighted * trace.latent_history.row(q);
  }

  for (int i = 0; i < n; ++i) {
    const NodeMap& map = model.maps[static_cast<std::size_t>(i)];
    ThetaGradient gi = grad_f_theta(map, trace.latent_pred[i]);
    gi *= residual_scale[i];
    for (int q = 0; q < p; ++q) {
      const double coupling = weighted.dot(model.var.lags[static_cast<std::size_t>(q)].col(i));
      if (coupling == 0.0) continue;
      ThetaGradient ginv = grad_g_theta_at(map, trace.latent_history(q, i));
      ginv *= coupling;
      gi += ginv;
    }
    grad.theta[static_cast<std::size_t>(i)] = gi;
  }
  return grad;
}

ModelGradient fd_gradient(const NlVarModel& model, const Eigen::MatrixXd& window,
                          const Eigen::VectorXd& target, double step) {
  if (!(step > 0.0)) throw ValidationError("fd_gradient: step must be positive");
  NlVarModel work = model;
  // The cost is evaluated in extended precision: the difference quotient of a
  // double-rounded cost would bottom out near 1e-9 absolute, which is not
  // negligible against the smallest gradient components.
  const auto cost_of = [&]() {
    return detail::forward_cost_t<long double>(work, window, target, 1e-19L, 1e-17L);
  };
  const auto central = [&](double& param) {
    const double saved = param;
    param = saved + step;
    const long double plus = cost_of();
    param = saved - step;
    const long double minus = cost_of();
    param = saved;
    return static_cast<double>((plus - minus) / (2.0L * static_cast<long double>(step)));
  };

  ModelGradient grad = ModelGradient::zero(model.shape);
  try {
    for (int q = 0; q < model.shape.order; ++q) {
      for (int i = 0; i < model.shape.n_nodes; ++i) {
        for (int j = 0; j < model.shape.n_nodes; ++j) {
          grad.var[static_cast<std::size_t>(q)](i, j) =
              central(work.var.lags[static_cast<std::size_t>(q)](i, j));
        }
      }
    }
    for (int i = 0; i < model.shape.n_nodes; ++i) {
      NodeMap& map = work.maps[static_cast<std::size_t>(i)];
      ThetaGradient& gi = grad.theta[static_cast<std::size_t>(i)];
      for (int j = 0; j < model.shape.n_units; ++j) {
        gi.d_alpha[j] = central(map.alpha[j]);
        gi.d_weight[j] = central(map.weight[j]);
        gi.d_shift[j] = central(map.shift[j]);
      }
      gi.d_bias = central(map.bias);
    }
  } catch (const NumericalError& err) {
    throw NumericalError(std::string(err.what()) +
                         " (inversion failed under perturbation; the finite-difference step may be too large)");
  }
  return grad;
}

ModelGradient grad_batch(const NlVarModel& model, const std::vector<Eigen::MatrixXd>& windows,
                         const std::vector<Eigen::VectorXd>& targets, double inversion_tol) {
  if (windows.empty()) throw ValidationError("grad_batch: empty batch");
  if (windows.size() != targets.size()) {
    throw ValidationError("grad_batch: window/target count mismatch");
  }
  ModelGradient acc = ModelGradient::zero(model.shape);
  for (std::size_t b = 0; b < windows.size(); ++b) {
    const ForwardResult step = forward_trace(model, windows[b], targets[b], inversion_tol);
    acc += grad_timestep(model, windows[b], targets[b], step.trace);
  }
  acc *= 1.0 / static_cast<double>(windows.size());
  return acc;
}

GradCheckInstance make_gradcheck_instance(std::uint64_t seed, const ModelShape& shape) {
  validate(shape);
  RandomStream rng(seed);
  const int n = shape.n_nodes;
  const int p = shape.order;
  const int m = shape.n_units;

  GradCheckInstance inst;
  inst.model.shape = shape;
  inst.model.maps.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    NodeMap map;
    map.range = RangeBounds{-1.0, 1.0};
    map.alpha.resize(m);
    map.weight.resize(m);
    map.shift.resize(m);
    for (int j = 0; j < m; ++j) map.alpha[j] = rng.uniform(0.2, 1.0);
    map.alpha *= map.range.span() / map.alpha.sum();
    for (int j = 0; j < m; ++j) map.weight[j] = rng.uniform(0.7, 1.3);
    for (int j = 0; j < m; ++j) map.shift[j] = rng.uniform(-1.0, 1.0);
    map.bias = map.range.lower;
    inst.model.maps.push_back(std::move(map));
  }
  inst.model.var = VarCoefficients::zero(p, n);
  const double coeff_std = 0.35 / std::sqrt(static_cast<double>(n * p));
  for (auto& lag : inst.model.var.lags) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) lag(i, j) = coeff_std * rng.gaussian();
    }
  }

  inst.window.resize(p, n);
  for (int i = 0; i < n; ++i) {
    const RangeBounds& r = inst.model.maps[static_cast<std::size_t>(i)].range;
    const double pad = 0.2 * r.span();
    for (int q = 0; q < p; ++q) inst.window(q, i) = rng.uniform(r.lower + pad, r.upper - pad);
  }

  const ForwardResult base = forward_trace(inst.model, inst.window, Eigen::VectorXd::Zero(n));
  inst.target.resize(n);
  for (int i = 0; i < n; ++i) {
    const double span = inst.model.maps[static_cast<std::size_t>(i)].range.span();
    inst.target[i] = base.trace.observed_pred[i] + rng.uniform(0.1, 0.3) * span *
                                                       (rng.uniform01() < 0.5 ? -1.0 : 1.0);
  }
  return inst;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

double GradCheckReport::max_rel() const {
  return std::max({max_rel_var, max_rel_alpha, max_rel_weight, max_rel_shift, max_rel_bias});
}

GradCheckReport check_gradients(const NlVarModel& model, const Eigen::MatrixXd& window,
                                const Eigen::VectorXd& target, double step) {
  const ForwardResult base = forward_trace(model, window, target, kFdInversionTol);
  const ModelGradient analytic = grad_timestep(model, window, target, base.trace);
  const ModelGradient numeric = fd_gradient(model, window, target, step);
  return compare_gradients(analytic, numeric);
}

GradCheckReport compare_gradients(const ModelGradient& analytic, const ModelGradient& numeric) {
  GradCheckReport report;
  for (std::size_t q = 0; q < analytic.var.size(); ++q) {
    for (int i = 0; i < analytic.var[q].rows(); ++i) {
      for (int j = 0; j < analytic.var[q].cols(); ++j) {
        report.max_rel_var =
            std::max(report.max_rel_var, relative_error(analytic.var[q](i, j), numeric.var[q](i, j)));
      }
    }
  }
  for (std::size_t i = 0; i < analytic.theta.size(); ++i) {
    const ThetaGradient& a = analytic.theta[i];
    const ThetaGradient& b = numeric.theta[i];
    for (int j = 0; j < a.d_alpha.size(); ++j) {
      report.max_rel_alpha = std::max(report.max_rel_alpha, relative_error(a.d_alpha[j], b.d_alpha[j]));
      report.max_rel_weight =
          std::max(report.max_rel_weight, relative_error(a.d_weight[j], b.d_weight[j]));
      report.max_rel_shift = std::max(report.max_rel_shift, relative_error(a.d_shift[j], b.d_shift[j]));
    }
    report.max_rel_bias = std::max(report.max_rel_bias, relative_error(a.d_bias, b.d_bias));
  }
  return report;
}

}  // namespace nlvar
