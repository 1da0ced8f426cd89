#include "nlvar/var_dynamics.hpp"

#include "nlvar/rng.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

namespace nlvar {

namespace {

constexpr std::uint64_t kPowerIterationSeed = 0x9e3779b97f4a7c15ULL;

// Applies the companion operator to a stacked state [y(t-1); ...; y(t-P)].
Eigen::VectorXd companion_apply(const VarCoefficients& var, const Eigen::VectorXd& x) {
  const int n = var.n_nodes();
  const int p = var.order();
  Eigen::VectorXd out(n * p);
  out.head(n).setZero();
  for (int q = 0; q < p; ++q) {
    out.head(n) += var.lags[static_cast<std::size_t>(q)] * x.segment(q * n, n);
  }
  if (p > 1) out.tail(n * (p - 1)) = x.head(n * (p - 1));
  return out;
}

Eigen::VectorXd random_unit_vector(RandomStream& rng, long dim) {
  Eigen::VectorXd v(dim);
  for (long i = 0; i < dim; ++i) v[i] = rng.gaussian();
  const double norm = v.norm();
  return norm > 0.0 ? Eigen::VectorXd(v / norm) : Eigen::VectorXd::Unit(dim, 0);
}

// Largest root modulus of the monic polynomial
//   lambda^r - c[r-1]*lambda^(r-1) - ... - c[1]*lambda - c[0],
// by Durand-Kerner iteration on all roots simultaneously.
double max_root_modulus(const Eigen::VectorXd& coeffs) {
  const int r = static_cast<int>(coeffs.size());
  if (r == 0) return 0.0;
  if (r == 1) return std::abs(coeffs[0]);

  double guess = 0.0;
  for (int i = 0; i < r; ++i) {
    guess = std::max(guess, std::pow(std::abs(coeffs[i]), 1.0 / (r - i)));
  }
  guess = std::max(guess, 1e-30);

  std::vector<std::complex<double>> roots(static_cast<std::size_t>(r));
  const std::complex<double> rotation(0.4, 0.9);  // avoids symmetric starting clusters
  std::complex<double> point(1.0, 0.0);
  for (auto& root : roots) {
    point *= rotation;
    root = guess * point;
  }
  const auto eval = [&](const std::complex<double>& z) {
    std::complex<double> acc(1.0, 0.0);
    for (int i = r - 1; i >= 0; --i) acc = acc * z - coeffs[i];
    return acc;
  };
  for (int sweep = 0; sweep < 200; ++sweep) {
    double moved = 0.0;
    for (int i = 0; i < r; ++i) {
      std::complex<double> denom(1.0, 0.0);
      for (int j = 0; j < r; ++j) {
        if (j != i) denom *= roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
      }
      if (denom == std::complex<double>(0.0, 0.0)) denom = std::complex<double>(1e-30, 0.0);
      const std::complex<double> delta = eval(roots[static_cast<std::size_t>(i)]) / denom;
      roots[static_cast<std::size_t>(i)] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved <= 1e-15 * guess) break;
  }
  double radius = 0.0;
  for (const auto& root : roots) radius = std::max(radius, std::abs(root));
  return radius;
}

// One power-iteration round: advances the Krylov chain by kChainLength
// applications and extracts the dominant root moduli from the best-fitting
// linear recurrence over the tail of the chain. Returns the radius estimate,
// or a negative value when the chain dies (start vector in a decaying
// subspace).
constexpr int kChainLength = 12;
constexpr int kMaxRecurrenceOrder = 6;

double radius_round(const VarCoefficients& var, Eigen::VectorXd& x) {
  const long dim = x.size();
  Eigen::MatrixXd chain(dim, kChainLength + 1);
  Eigen::VectorXd scale(kChainLength + 1);
  chain.col(0) = x;
  scale[0] = 1.0;
  for (int k = 1; k <= kChainLength; ++k) {
    const Eigen::VectorXd next = companion_apply(var, chain.col(k - 1));
    const double norm = next.norm();
    if (norm == 0.0 || !std::isfinite(norm)) return -1.0;
    chain.col(k) = next / norm;
    scale[k] = norm;
  }
  x = chain.col(kChainLength);

  const int max_order = std::min<int>(kMaxRecurrenceOrder, static_cast<int>(dim));
  double fallback = -1.0;
  for (int order = 1; order <= max_order; ++order) {
    const int base = kChainLength - order;
    const auto basis = chain.middleCols(base, order);
    const Eigen::MatrixXd gram = basis.transpose() * basis;
    const Eigen::VectorXd rhs = basis.transpose() * chain.col(kChainLength);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const double d_max = ldlt.vectorD().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || d_max <= 0.0 ||
        ldlt.vectorD().cwiseAbs().minCoeff() < 1e-13 * d_max) {
      break;  // chain effectively lower-dimensional; keep the last good fit
    }
    const Eigen::VectorXd fitted = ldlt.solve(rhs);
    const double residual = (chain.col(kChainLength) - basis * fitted).norm();

    // Unscale: coefficient of lambda^i is fitted[i] * prod(scale[base+i+1 .. end]).
    Eigen::VectorXd coeffs(order);
    double product = 1.0;
    for (int i = order - 1; i >= 0; --i) {
      product *= scale[base + i + 1];
      coeffs[i] = fitted[i] * product;
    }
    const double radius = max_root_modulus(coeffs);
    if (!std::isfinite(radius)) break;
    fallback = radius;
    if (residual <= 1e-12) return radius;  // minimal adequate recurrence order
  }
  return fallback;
}

}  // namespace

Eigen::VectorXd predict_latent(const VarCoefficients& var, const Eigen::MatrixXd& history) {
  const int n = var.n_nodes();
  const int p = var.order();
  if (history.rows() != p || history.cols() != n) {
    std::ostringstream msg;
    msg << "predict_latent: history is " << history.rows() << "x" << history.cols()
        << ", expected " << p << "x" << n;
    throw ValidationError(msg.str());
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int q = 0; q < p; ++q) {
    out += var.lags[static_cast<std::size_t>(q)] * history.row(q).transpose();
  }
  return out;
}

Eigen::MatrixXd companion_matrix(const VarCoefficients& var) {
  const int n = var.n_nodes();
  const int p = var.order();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n * p, n * p);
  for (int q = 0; q < p; ++q) {
    c.block(0, q * n, n, n) = var.lags[static_cast<std::size_t>(q)];
  }
  if (p > 1) {
    c.block(n, 0, n * (p - 1), n * (p - 1)) =
        Eigen::MatrixXd::Identity(n * (p - 1), n * (p - 1));
  }
  return c;
}

double companion_spectral_radius(const VarCoefficients& var) {
  validate(var);
  const int dim = var.n_nodes() * var.order();

  double max_abs = 0.0;
  for (const auto& lag : var.lags) max_abs = std::max(max_abs, lag.cwiseAbs().maxCoeff());
  if (max_abs == 0.0) return 0.0;

  RandomStream rng(kPowerIterationSeed);
  Eigen::VectorXd x = random_unit_vector(rng, dim);
  double estimate = -1.0;
  int restarts = 0;

  for (int iter = 0; iter < 1000; ++iter) {
    const double rho = radius_round(var, x);
    if (rho < 0.0) {
      if (++restarts > 3) return 0.0;  // every start dies out: nilpotent
      x = random_unit_vector(rng, dim);
      continue;
    }
    if (iter > 1 && estimate >= 0.0 &&
        std::abs(rho - estimate) <= 1e-12 * std::max(rho, 1e-300)) {
      return rho;
    }
    estimate = rho;
  }
  return std::max(estimate, 0.0);
}

VarCoefficients stabilize(const VarCoefficients& var, double target_radius) {
  if (!(target_radius > 0.0 && target_radius < 1.0)) {
    throw ValidationError("stabilize: target radius must lie in (0, 1)");
  }
  const double radius = companion_spectral_radius(var);
  if (radius == 0.0) return var;
  const double scale = target_radius / radius;
  VarCoefficients out = var;
  double factor = 1.0;
  for (auto& lag : out.lags) {
    factor *= scale;  // lag p gets scale^p, rescaling every root by `scale`
    lag *= factor;
  }
  return out;
}

TimeSeriesPanel simulate_var(const VarCoefficients& var, const InnovationSpec& innovation,
                             long t_total, long burn_in,
                             const std::optional<Eigen::MatrixXd>& initial_state) {
  validate(var);
  if (!(std::isfinite(innovation.std_dev) && innovation.std_dev >= 0.0)) {
    throw ValidationError("simulate_var: innovation std_dev must be finite and non-negative");
  }
  if (t_total < 1) throw ValidationError("simulate_var: t_total must be >= 1");
  if (burn_in < 0) throw ValidationError("simulate_var: burn_in must be >= 0");

  const int n = var.n_nodes();
  const int p = var.order();
  const double radius = companion_spectral_radius(var);
  if (radius >= 1.0) {
    std::ostringstream msg;
    msg << "simulate_var: unstable coefficients (companion spectral radius " << radius << " >= 1)";
    throw NumericalError(msg.str());
  }
  if (initial_state &&
      (initial_state->rows() != p || initial_state->cols() != n)) {
    throw ValidationError("simulate_var: initial_state must be P x N");
  }

  const long total = std::max<long>(burn_in + t_total, p);
  Eigen::MatrixXd y(total, n);
  RandomStream rng(innovation.seed);
  Eigen::RowVectorXd u(n);
  for (long t = 0; t < total; ++t) {
    for (int j = 0; j < n; ++j) u[j] = innovation.std_dev * rng.gaussian();
    if (t < p) {
      y.row(t) = initial_state ? initial_state->row(t) : u;
      continue;
    }
    Eigen::RowVectorXd row = u;
    for (int q = 0; q < p; ++q) {
      row += (var.lags[static_cast<std::size_t>(q)] * y.row(t - 1 - q).transpose()).transpose();
    }
    y.row(t) = row;
  }

  TimeSeriesPanel panel;
  panel.data = y.middleRows(burn_in, t_total);
  panel.role = SeriesRole::latent;
  return panel;
}

}  // namespace nlvar
