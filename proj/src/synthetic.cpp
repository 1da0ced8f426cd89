#include "nlvar/synthetic.hpp"

#include "nlvar/monotone_map.hpp"
#include "nlvar/rng.hpp"

namespace nlvar {

namespace {
constexpr std::uint64_t kMapsSeedSalt = 0xa5a5a5a5a5a5a5a5ULL;
constexpr std::uint64_t kInnovationSeedSalt = 0x5a5a5a5a5a5a5a5aULL;
}  // namespace

std::vector<RangeBounds> default_ranges(int n_nodes) {
  return std::vector<RangeBounds>(static_cast<std::size_t>(n_nodes), RangeBounds{-1.0, 1.0});
}

VarCoefficients random_var_coeffs(const ModelShape& shape, double target_radius,
                                  std::uint64_t seed) {
  validate(shape);
  if (!(target_radius > 0.0 && target_radius < 1.0)) {
    throw ValidationError("random_var_coeffs: target radius must lie in (0, 1)");
  }
  RandomStream rng(seed);
  VarCoefficients var = VarCoefficients::zero(shape.order, shape.n_nodes);
  for (auto& lag : var.lags) {
    for (int i = 0; i < shape.n_nodes; ++i) {
      for (int j = 0; j < shape.n_nodes; ++j) lag(i, j) = rng.gaussian();
    }
  }
  return stabilize(var, target_radius);
}

std::vector<NodeMap> random_node_maps(const ModelShape& shape,
                                      const std::vector<RangeBounds>& ranges,
                                      std::uint64_t seed) {
  validate(shape);
  if (static_cast<int>(ranges.size()) != shape.n_nodes) {
    throw ValidationError("random_node_maps: need one range per node");
  }
  RandomStream rng(seed);
  const int m = shape.n_units;
  std::vector<NodeMap> maps;
  maps.reserve(static_cast<std::size_t>(shape.n_nodes));
  for (int i = 0; i < shape.n_nodes; ++i) {
    validate(ranges[static_cast<std::size_t>(i)], i);
    NodeMap map;
    map.range = ranges[static_cast<std::size_t>(i)];
    map.alpha.resize(m);
    map.weight.resize(m);
    map.shift.resize(m);
    for (int j = 0; j < m; ++j) map.alpha[j] = rng.uniform01();
    map.alpha *= map.range.span() / map.alpha.sum();
    for (int j = 0; j < m; ++j) map.weight[j] = rng.uniform(0.5, 2.0);
    for (int j = 0; j < m; ++j) map.shift[j] = rng.uniform(-2.0, 2.0);
    map.bias = map.range.lower;
    maps.push_back(std::move(map));
  }
  return maps;
}

SyntheticDataset generate_dataset(const ModelShape& shape, double target_radius, double noise_std,
                                  const std::vector<RangeBounds>& ranges, long t_total,
                                  std::uint64_t seed, long burn_in) {
  SyntheticDataset out;
  out.ground_truth.shape = shape;
  out.ground_truth.var = random_var_coeffs(shape, target_radius, seed);
  out.ground_truth.maps = random_node_maps(shape, ranges, seed ^ kMapsSeedSalt);

  out.latent = simulate_var(out.ground_truth.var, InnovationSpec{noise_std, seed ^ kInnovationSeedSalt},
                            t_total, burn_in);

  out.observed.role = SeriesRole::observed;
  out.observed.data.resize(out.latent.data.rows(), out.latent.data.cols());
  for (long t = 0; t < out.latent.data.rows(); ++t) {
    for (int i = 0; i < shape.n_nodes; ++i) {
      out.observed.data(t, i) =
          eval_f(out.ground_truth.maps[static_cast<std::size_t>(i)], out.latent.data(t, i));
    }
  }
  return out;
}

}  // namespace nlvar
