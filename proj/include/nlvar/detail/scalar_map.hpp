#pragma once

#include "nlvar/types.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <vector>

// Scalar forward math templated on the floating-point type. The public
// double-precision API wraps Real = double; the finite-difference oracle
// evaluates the same expressions with Real = long double so that its
// difference quotients are not limited by double rounding.

namespace nlvar::detail {

std::atomic<std::uint64_t>& clamp_counter();

template <typename Real>
Real sigmoid_t(Real x) {
  if (x >= Real(0)) return Real(1) / (Real(1) + std::exp(-x));
  const Real e = std::exp(x);  // underflows to 0 for very negative x
  return e / (Real(1) + e);
}

template <typename Real>
Real eval_f_t(const NodeMap& map, Real y) {
  Real acc = static_cast<Real>(map.bias);
  for (int j = 0; j < map.units(); ++j) {
    acc += static_cast<Real>(map.alpha[j]) *
           sigmoid_t<Real>(static_cast<Real>(map.weight[j]) * y - static_cast<Real>(map.shift[j]));
  }
  return acc;
}

template <typename Real>
Real eval_f_prime_t(const NodeMap& map, Real y) {
  Real acc = Real(0);
  for (int j = 0; j < map.units(); ++j) {
    const Real s =
        sigmoid_t<Real>(static_cast<Real>(map.weight[j]) * y - static_cast<Real>(map.shift[j]));
    acc += static_cast<Real>(map.alpha[j]) * static_cast<Real>(map.weight[j]) * s * (Real(1) - s);
  }
  return acc;
}

// Bracket doubling from [-1, 1] followed by bisection; stops when
// |f(y) - z| <= f_tol or the bracket is narrower than width_floor.
template <typename Real>
Real eval_g_t(const NodeMap& map, Real z, Real f_tol, Real width_floor) {
  if (map.alpha.dot(map.weight) <= 0.0) {
    throw NumericalError("eval_g: map is not strictly monotone (sum of alpha_j * weight_j is zero)");
  }
  const Real span = static_cast<Real>(map.range.upper) - static_cast<Real>(map.range.lower);
  const Real margin = Real(1e-9) * span;
  Real target = z;
  if (target < static_cast<Real>(map.range.lower) + margin) {
    target = static_cast<Real>(map.range.lower) + margin;
    clamp_counter().fetch_add(1, std::memory_order_relaxed);
  } else if (target > static_cast<Real>(map.range.upper) - margin) {
    target = static_cast<Real>(map.range.upper) - margin;
    clamp_counter().fetch_add(1, std::memory_order_relaxed);
  }

  Real half = Real(1);
  Real f_lo = eval_f_t<Real>(map, -half);
  Real f_hi = eval_f_t<Real>(map, half);
  int doublings = 0;
  while (!(f_lo < target && target < f_hi)) {
    if (f_lo == target) return -half;
    if (f_hi == target) return half;
    if (++doublings > 64) {
      std::ostringstream msg;
      msg << "eval_g: bracket expansion exhausted after 64 doublings inverting z="
          << static_cast<double>(z) << " (image (" << map.range.lower << ", " << map.range.upper
          << "))";
      throw NumericalError(msg.str());
    }
    half *= Real(2);
    f_lo = eval_f_t<Real>(map, -half);
    f_hi = eval_f_t<Real>(map, half);
  }

  Real lo = -half;
  Real hi = half;
  while (hi - lo >= width_floor) {
    const Real mid = (lo + hi) / Real(2);
    if (mid <= lo || mid >= hi) break;  // bracket narrower than one ulp
    const Real fm = eval_f_t<Real>(map, mid);
    if (std::abs(fm - target) <= f_tol) return mid;
    if (fm < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / Real(2);
}

// Full one-step cost of Eqs.-style forward propagation at scalar type Real.
template <typename Real>
Real forward_cost_t(const NlVarModel& model, const Eigen::MatrixXd& window,
                    const Eigen::VectorXd& target, Real f_tol_fraction, Real width_floor) {
  const int n = model.shape.n_nodes;
  const int p = model.shape.order;
  std::vector<Real> latent(static_cast<std::size_t>(n * p));
  for (int i = 0; i < n; ++i) {
    const NodeMap& map = model.maps[static_cast<std::size_t>(i)];
    const Real span = static_cast<Real>(map.range.upper) - static_cast<Real>(map.range.lower);
    for (int q = 0; q < p; ++q) {
      latent[static_cast<std::size_t>(q * n + i)] =
          eval_g_t<Real>(map, static_cast<Real>(window(q, i)), f_tol_fraction * span, width_floor);
    }
  }
  Real cost = Real(0);
  for (int i = 0; i < n; ++i) {
    Real pred = Real(0);
    for (int q = 0; q < p; ++q) {
      const auto& lag = model.var.lags[static_cast<std::size_t>(q)];
      for (int j = 0; j < n; ++j) {
        pred += static_cast<Real>(lag(i, j)) * latent[static_cast<std::size_t>(q * n + j)];
      }
    }
    const Real observed = eval_f_t<Real>(model.maps[static_cast<std::size_t>(i)], pred);
    const Real diff = static_cast<Real>(target[i]) - observed;
    cost += diff * diff;
  }
  return cost;
}

}  // namespace nlvar::detail
