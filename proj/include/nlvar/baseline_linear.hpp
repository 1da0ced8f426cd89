#pragma once

#include "nlvar/types.hpp"

namespace nlvar {

inline constexpr double kDefaultRidge = 1e-8;

/// Least-squares VAR fit on observed data: stacks lagged regressors
/// x_t = [z[t-1]; ...; z[t-P]] and solves (X'X + ridge*I) B = X'Z with an
/// LDLT factorization. With ridge = 0 a rank-deficient normal matrix is
/// rejected with advice to add ridge.
VarCoefficients fit_ols(const TimeSeriesPanel& panel, int order, double ridge = kDefaultRidge);

/// Teacher-forced mean squared one-step error of a linear model with identity
/// observation maps; same protocol as evaluate_mse.
double evaluate_linear(const VarCoefficients& var, const TimeSeriesPanel& panel);

/// Per-node variant of evaluate_linear.
Eigen::VectorXd evaluate_linear_per_node(const VarCoefficients& var, const TimeSeriesPanel& panel);

}  // namespace nlvar
