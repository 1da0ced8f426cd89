#pragma once

#include "nlvar/types.hpp"

namespace nlvar {

/// Gradient of a node map's scalar output with respect to its parameters.
struct ThetaGradient {
  Eigen::VectorXd d_alpha;
  Eigen::VectorXd d_weight;
  Eigen::VectorXd d_shift;
  double d_bias = 0.0;

  static ThetaGradient zero(int units);
  ThetaGradient& operator+=(const ThetaGradient& other);
  ThetaGradient& operator*=(double factor);
};

/// Inversion tolerance, relative to the range span.
inline constexpr double kDefaultInversionTol = 1e-10;
/// Bisection stops once the bracket is narrower than this, tolerance or not.
inline constexpr double kBisectionWidthFloor = 1e-13;
/// Inversion targets are pulled this fraction of the span inside the image
/// boundary; a counter of such clamps is exposed for diagnostics.
inline constexpr double kClampMargin = 1e-9;
/// Below this slope the inverse gradient is treated as singular.
inline constexpr double kDerivativeFloor = 1e-12;

/// Logistic function, overflow-safe for any finite input.
double sigmoid(double x);

/// Derivative of the logistic function, sigmoid(x) * (1 - sigmoid(x)).
double sigmoid_prime(double x);

/// Map value sum_j alpha[j] * sigmoid(weight[j] * y - shift[j]) + bias.
double eval_f(const NodeMap& map, double y);

/// Slope of the map at y; strictly positive whenever some alpha[j]*weight[j] > 0.
double eval_f_prime(const NodeMap& map, double y);

/// Closed-form parameter gradient of eval_f at fixed input y.
ThetaGradient grad_f_theta(const NodeMap& map, double y);

/// Numerical inverse of eval_f: symmetric bracket doubling from [-1, 1]
/// followed by bisection until |f(y) - z| <= tol * span or the bracket width
/// falls under kBisectionWidthFloor. Targets outside the image interval are
/// clamped just inside its boundary and counted (see clamp_count()).
double eval_g(const NodeMap& map, double z, double tol = kDefaultInversionTol);

/// Parameter gradient of the inverse, obtained by implicit differentiation
/// of f(g(z)) = z:  -grad_f_theta(y*) / f'(y*)  with y* = eval_g(map, z, tol).
ThetaGradient grad_g_theta(const NodeMap& map, double z, double tol = kDefaultInversionTol);

/// Same gradient, reusing an inverse point y* that was already computed.
ThetaGradient grad_g_theta_at(const NodeMap& map, double y_star);

/// Number of inversion targets clamped into the image interval so far.
std::uint64_t clamp_count();
void reset_clamp_count();

}  // namespace nlvar
