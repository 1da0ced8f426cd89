#pragma once

#include "nlvar/types.hpp"
#include "nlvar/var_dynamics.hpp"

namespace nlvar {

inline constexpr double kDefaultNoiseStd = 0.1;

/// (-1, 1) for every node.
std::vector<RangeBounds> default_ranges(int n_nodes);

/// Coefficients drawn i.i.d. from a standard Gaussian (lag-major, row-major
/// draw order), then rescaled to the target companion spectral radius.
VarCoefficients random_var_coeffs(const ModelShape& shape, double target_radius,
                                  std::uint64_t seed);

/// Random strictly feasible node maps: alpha from uniform(0,1)^M rescaled to
/// the range span, slopes uniform in [0.5, 2], shifts uniform in [-2, 2],
/// bias at the range floor.
std::vector<NodeMap> random_node_maps(const ModelShape& shape,
                                      const std::vector<RangeBounds>& ranges,
                                      std::uint64_t seed);

struct SyntheticDataset {
  NlVarModel ground_truth;
  TimeSeriesPanel observed;
  TimeSeriesPanel latent;
};

/// Full generation pipeline: random stable coefficients, random node maps,
/// latent simulation, and per-node nonlinear observation z[t] = f(y[t]).
/// Sub-stages use seeds derived from `seed`, so the dataset is fully
/// deterministic.
SyntheticDataset generate_dataset(const ModelShape& shape, double target_radius,
                                  double noise_std, const std::vector<RangeBounds>& ranges,
                                  long t_total, std::uint64_t seed,
                                  long burn_in = kDefaultBurnIn);

}  // namespace nlvar
