#include "nlvar/types.hpp"

#include <cmath>
#include <sstream>

namespace nlvar {

void validate(const ModelShape& shape) {
  if (shape.n_nodes < 1 || shape.order < 1 || shape.n_units < 1) {
    std::ostringstream msg;
    msg << "invalid model shape: n_nodes=" << shape.n_nodes << " order=" << shape.order
        << " n_units=" << shape.n_units << " (all must be >= 1)";
    throw ValidationError(msg.str());
  }
}

VarCoefficients VarCoefficients::zero(int order, int n_nodes) {
  VarCoefficients var;
  var.lags.assign(static_cast<std::size_t>(order), Eigen::MatrixXd::Zero(n_nodes, n_nodes));
  return var;
}

void validate(const VarCoefficients& var) {
  if (var.lags.empty()) throw ValidationError("VAR coefficients: no lag matrices");
  const long n = var.lags.front().rows();
  for (std::size_t p = 0; p < var.lags.size(); ++p) {
    const auto& a = var.lags[p];
    if (a.rows() != n || a.cols() != n) {
      throw ValidationError("VAR coefficients: lag " + std::to_string(p + 1) +
                            " is not square of the common node count");
    }
    if (!a.allFinite()) {
      throw ValidationError("VAR coefficients: non-finite entry in lag " + std::to_string(p + 1));
    }
  }
}

void validate(const RangeBounds& bounds, int node_index) {
  if (std::isfinite(bounds.lower) && std::isfinite(bounds.upper) && bounds.lower < bounds.upper) {
    return;
  }
  std::ostringstream msg;
  msg << "invalid range bounds";
  if (node_index >= 0) msg << " for node " << node_index;
  msg << ": [" << bounds.lower << ", " << bounds.upper << "] (need finite lower < upper)";
  throw ValidationError(msg.str());
}

std::vector<RangeBounds> infer_ranges(const TimeSeriesPanel& panel, double margin_fraction) {
  if (panel.role != SeriesRole::observed) {
    throw ValidationError("infer_ranges: panel must hold observed series");
  }
  if (!std::isfinite(margin_fraction) || margin_fraction < 0.0) {
    throw ValidationError("infer_ranges: margin_fraction must be finite and non-negative");
  }
  if (panel.length() < 2) throw ValidationError("infer_ranges: need at least 2 samples");

  std::vector<RangeBounds> out;
  out.reserve(static_cast<std::size_t>(panel.n_nodes()));
  for (int i = 0; i < panel.n_nodes(); ++i) {
    const auto col = panel.data.col(i);
    for (long t = 0; t < panel.length(); ++t) {
      if (!std::isfinite(col[t])) {
        std::ostringstream msg;
        msg << "infer_ranges: non-finite value at node " << i << ", t=" << t;
        throw ValidationError(msg.str());
      }
    }
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    double span = hi - lo;
    if (span == 0.0) span = 1.0;  // degenerate constant column
    RangeBounds bounds{lo - margin_fraction * span, hi + margin_fraction * span};
    if (!(bounds.lower < bounds.upper)) {
      // only reachable for a constant column with zero margin
      bounds = RangeBounds{lo - 0.5, hi + 0.5};
    }
    out.push_back(bounds);
  }
  return out;
}

double feasibility_violation(const NodeMap& map, double w_floor) {
  double v = 0.0;
  for (int j = 0; j < map.units(); ++j) {
    v = std::max(v, -map.alpha[j]);
    v = std::max(v, w_floor - map.weight[j]);
  }
  v = std::max(v, std::abs(map.alpha.sum() - map.range.span()));
  v = std::max(v, std::abs(map.bias - map.range.lower));
  return v;
}

double feasibility_violation(const NlVarModel& model, double w_floor) {
  double v = 0.0;
  for (const auto& map : model.maps) v = std::max(v, feasibility_violation(map, w_floor));
  return v;
}

void check_feasible(const NlVarModel& model, double tol) {
  validate(model.shape);
  const int n = model.shape.n_nodes;
  const int p = model.shape.order;
  const int m = model.shape.n_units;
  if (static_cast<int>(model.maps.size()) != n) {
    throw ValidationError("model has " + std::to_string(model.maps.size()) + " node maps, shape says " +
                          std::to_string(n));
  }
  if (model.var.order() != p || model.var.n_nodes() != n) {
    throw ValidationError("VAR tensor dimensions do not match the model shape");
  }
  validate(model.var);
  for (int i = 0; i < n; ++i) {
    const NodeMap& map = model.maps[i];
    const std::string node = "node " + std::to_string(i);
    if (map.units() != m || map.weight.size() != m || map.shift.size() != m) {
      throw ValidationError(node + ": parameter vectors do not all have length " + std::to_string(m));
    }
    validate(map.range, i);
    if (!map.alpha.allFinite() || !map.weight.allFinite() || !map.shift.allFinite() ||
        !std::isfinite(map.bias)) {
      throw ValidationError(node + ": non-finite map parameter");
    }
    for (int j = 0; j < m; ++j) {
      if (map.alpha[j] < -tol) {
        throw ValidationError(node + ": alpha[" + std::to_string(j) + "] < 0");
      }
      if (map.weight[j] <= 0.0) {
        throw ValidationError(node + ": weight[" + std::to_string(j) + "] <= 0");
      }
    }
    const double span = map.range.span();
    if (std::abs(map.alpha.sum() - span) > tol * std::max(1.0, std::abs(span))) {
      std::ostringstream msg;
      msg << node << ": sum(alpha) = " << map.alpha.sum() << " but range span = " << span
          << " (constraint sum(alpha) == upper - lower)";
      throw ValidationError(msg.str());
    }
    if (std::abs(map.bias - map.range.lower) > tol * std::max(1.0, std::abs(span))) {
      std::ostringstream msg;
      msg << node << ": bias = " << map.bias << " but range lower = " << map.range.lower
          << " (constraint bias == lower)";
      throw ValidationError(msg.str());
    }
  }
}

}  // namespace nlvar
