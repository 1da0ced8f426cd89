#pragma once

#include "nlvar/types.hpp"

#include <optional>

namespace nlvar {

/// White Gaussian innovation process driving the latent recursion.
struct InnovationSpec {
  double std_dev = 1.0;
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultTargetRadius = 0.95;
inline constexpr long kDefaultBurnIn = 200;

/// One-step latent prediction: out[i] = sum_p sum_j lags[p](i,j) * history(p, j),
/// where history row p-1 holds the state p steps in the past.
Eigen::VectorXd predict_latent(const VarCoefficients& var, const Eigen::MatrixXd& history);

/// Simulates the latent recursion driven by i.i.d. Gaussian innovations.
/// The first P samples are pure innovations unless initial_state (P x N,
/// row p = sample at time p) overrides them. burn_in leading samples are
/// discarded; the next t_total are returned. Innovations are drawn one per
/// (time, node) cell in time-major order from RandomStream(seed), so output
/// is bit-reproducible for a given seed.
TimeSeriesPanel simulate_var(const VarCoefficients& var, const InnovationSpec& innovation,
                             long t_total, long burn_in = kDefaultBurnIn,
                             const std::optional<Eigen::MatrixXd>& initial_state = std::nullopt);

/// Spectral radius of the NP x NP companion matrix, by power iteration on the
/// companion operator (deterministically seeded start vector, at most 1000
/// iterations, stop on relative change < 1e-12). Each iteration fits the two
/// dominant roots from a three-term Krylov recurrence, which also converges
/// when the dominant eigenvalues are a complex-conjugate pair.
double companion_spectral_radius(const VarCoefficients& var);

/// Dense NP x NP companion matrix [[A1 ... AP], [I 0 ... 0], ...].
Eigen::MatrixXd companion_matrix(const VarCoefficients& var);

/// Rescales lags[p] by (target_radius / radius)^(p+1), which multiplies every
/// characteristic root by target_radius / radius and therefore sets the
/// companion spectral radius to exactly target_radius. A zero-radius input is
/// returned unchanged.
VarCoefficients stabilize(const VarCoefficients& var, double target_radius = kDefaultTargetRadius);

}  // namespace nlvar
