#include "nlvar/monotone_map.hpp"

#include "nlvar/detail/scalar_map.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace nlvar {

namespace detail {
std::atomic<std::uint64_t>& clamp_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}
}  // namespace detail

ThetaGradient ThetaGradient::zero(int units) {
  ThetaGradient g;
  g.d_alpha = Eigen::VectorXd::Zero(units);
  g.d_weight = Eigen::VectorXd::Zero(units);
  g.d_shift = Eigen::VectorXd::Zero(units);
  g.d_bias = 0.0;
  return g;
}

ThetaGradient& ThetaGradient::operator+=(const ThetaGradient& other) {
  d_alpha += other.d_alpha;
  d_weight += other.d_weight;
  d_shift += other.d_shift;
  d_bias += other.d_bias;
  return *this;
}

ThetaGradient& ThetaGradient::operator*=(double factor) {
  d_alpha *= factor;
  d_weight *= factor;
  d_shift *= factor;
  d_bias *= factor;
  return *this;
}

double sigmoid(double x) { return detail::sigmoid_t<double>(x); }

double sigmoid_prime(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

double eval_f(const NodeMap& map, double y) { return detail::eval_f_t<double>(map, y); }

double eval_f_prime(const NodeMap& map, double y) {
  return detail::eval_f_prime_t<double>(map, y);
}

ThetaGradient grad_f_theta(const NodeMap& map, double y) {
  const int m = map.units();
  ThetaGradient g = ThetaGradient::zero(m);
  for (int j = 0; j < m; ++j) {
    const double arg = map.weight[j] * y - map.shift[j];
    const double s = sigmoid(arg);
    const double sp = s * (1.0 - s);
    g.d_alpha[j] = s;
    g.d_weight[j] = map.alpha[j] * y * sp;
    g.d_shift[j] = -map.alpha[j] * sp;
  }
  g.d_bias = 1.0;
  return g;
}

double eval_g(const NodeMap& map, double z, double tol) {
  if (!(tol > 0.0)) throw ValidationError("eval_g: tolerance must be positive");
  return detail::eval_g_t<double>(map, z, tol * map.range.span(), kBisectionWidthFloor);
}

ThetaGradient grad_g_theta_at(const NodeMap& map, double y_star) {
  const double slope = eval_f_prime(map, y_star);
  if (slope < kDerivativeFloor) {
    std::ostringstream msg;
    msg << "grad_g_theta: slope " << slope << " at inverse point " << y_star << " is below "
        << kDerivativeFloor << " (near-singular inverse)";
    throw NumericalError(msg.str());
  }
  ThetaGradient g = grad_f_theta(map, y_star);
  g *= -1.0 / slope;
  return g;
}

ThetaGradient grad_g_theta(const NodeMap& map, double z, double tol) {
  return grad_g_theta_at(map, eval_g(map, z, tol));
}

std::uint64_t clamp_count() {
  return detail::clamp_counter().load(std::memory_order_relaxed);
}

void reset_clamp_count() { detail::clamp_counter().store(0, std::memory_order_relaxed); }

}  // namespace nlvar
