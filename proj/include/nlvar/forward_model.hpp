#pragma once

#include "nlvar/monotone_map.hpp"
#include "nlvar/types.hpp"

namespace nlvar {

struct ForwardResult {
  ForwardTrace trace;
  double cost = 0.0;  ///< sum over nodes of squared observed residual
};

/// One observed-space prediction step: invert the window per node, apply the
/// latent recursion, map back through f, and accumulate the squared error
/// against target. window row p-1 holds z[t-p]; target holds z[t].
ForwardResult forward_trace(const NlVarModel& model, const Eigen::MatrixXd& window,
                            const Eigen::VectorXd& target,
                            double inversion_tol = kDefaultInversionTol);

/// Multi-step prediction: the window is inverted once, the latent recursion
/// runs `horizon` steps feeding its own predictions back, and each latent
/// prediction is mapped through f. Row h is the prediction h+1 steps ahead.
Eigen::MatrixXd predict_horizon(const NlVarModel& model, const Eigen::MatrixXd& window,
                                long horizon, double inversion_tol = kDefaultInversionTol);

/// Teacher-forced mean squared one-step error over t in [P, T), normalized
/// per node and per timestep.
double evaluate_mse(const NlVarModel& model, const TimeSeriesPanel& panel,
                    double inversion_tol = kDefaultInversionTol);

/// Per-node teacher-forced mean squared one-step error.
Eigen::VectorXd evaluate_node_mse(const NlVarModel& model, const TimeSeriesPanel& panel,
                                  double inversion_tol = kDefaultInversionTol);

}  // namespace nlvar
