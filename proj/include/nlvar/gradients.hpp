#pragma once

#include "nlvar/forward_model.hpp"
#include "nlvar/monotone_map.hpp"
#include "nlvar/types.hpp"

namespace nlvar {

/// Gradient of the per-timestep cost with respect to every model parameter.
struct ModelGradient {
  std::vector<Eigen::MatrixXd> var;  ///< per lag, N x N
  std::vector<ThetaGradient> theta;  ///< per node

  static ModelGradient zero(const ModelShape& shape);
  ModelGradient& operator+=(const ModelGradient& other);
  ModelGradient& operator*=(double factor);
};

/// Hand-derived backpropagation through the forward step. With residual
/// scale S_n = 2 * (observed_pred[n] - target[n]):
///   dC/d a^(p)(i,j) = S_i * f'_i(yhat_i) * latent_history(p, j)
///   dC/d theta_i    = S_i * grad_f_theta(map_i, yhat_i)
///                     + sum_n S_n * f'_n(yhat_n) * sum_p a^(p)(n,i)
///                       * grad_g_theta_at(map_i, latent_history(p, i))
/// The inverse-map gradients reuse the inversions stored in the trace, which
/// must come from forward_trace on the same (model, window, target).
ModelGradient grad_timestep(const NlVarModel& model, const Eigen::MatrixXd& window,
                            const Eigen::VectorXd& target, const ForwardTrace& trace);

/// Central finite differences of the forward cost under perturbation of every
/// parameter. The sum(alpha) constraint is intentionally not re-imposed: the
/// unconstrained cost is what the analytic expressions differentiate
/// (projection happens at the optimizer level). Inversions run at a tolerance
/// far below the step so bisection error stays out of the quotient.
ModelGradient fd_gradient(const NlVarModel& model, const Eigen::MatrixXd& window,
                          const Eigen::VectorXd& target, double step);

/// Arithmetic mean of grad_timestep over the batch, accumulated in batch
/// order (deterministic).
ModelGradient grad_batch(const NlVarModel& model, const std::vector<Eigen::MatrixXd>& windows,
                         const std::vector<Eigen::VectorXd>& targets,
                         double inversion_tol = kDefaultInversionTol);

/// A random strictly feasible model plus an in-range window and target,
/// sized for gradient checking. Draws keep every sigmoid unit inside its
/// responsive region so no gradient component degenerates to the noise floor
/// of the finite-difference quotient.
struct GradCheckInstance {
  NlVarModel model;
  Eigen::MatrixXd window;
  Eigen::VectorXd target;
};

GradCheckInstance make_gradcheck_instance(std::uint64_t seed, const ModelShape& shape);

/// Per-block worst relative error between grad_timestep and fd_gradient,
/// with rel(a, b) = |a - b| / max(|a|, |b|, 1e-8).
struct GradCheckReport {
  double max_rel_var = 0.0;
  double max_rel_alpha = 0.0;
  double max_rel_weight = 0.0;
  double max_rel_shift = 0.0;
  double max_rel_bias = 0.0;

  double max_rel() const;
};

GradCheckReport check_gradients(const NlVarModel& model, const Eigen::MatrixXd& window,
                                const Eigen::VectorXd& target, double step = 1e-6);

/// Per-block worst relative error between two gradients of the same shape.
GradCheckReport compare_gradients(const ModelGradient& a, const ModelGradient& b);

/// rel(a, b) with the 1e-8 denominator floor used throughout the checks.
double relative_error(double a, double b);

}  // namespace nlvar
