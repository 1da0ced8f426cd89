#pragma once

#include "nlvar/types.hpp"

#include <iosfwd>
#include <utility>

namespace nlvar {

inline constexpr double kDefaultEdgeThreshold = 0.05;

/// Directed edge source -> destination with the aggregated coupling strength.
struct Edge {
  int source = 0;
  int destination = 0;
  double strength = 0.0;
};

/// Directed edges in source-major, then destination, order. Self-loops are
/// meaningful (diagonal VAR terms).
struct EdgeList {
  std::vector<Edge> edges;
};

/// Edge j -> i is included iff max over lags of |a^(p)(i,j)| exceeds the
/// threshold; that maximum is recorded as the strength.
EdgeList extract_topology(const VarCoefficients& var, double threshold = kDefaultEdgeThreshold);

/// Set precision and recall over directed edges, strengths ignored. An empty
/// estimate scores precision 1 against an empty truth and 0 otherwise; recall
/// is 1 when the truth is empty.
std::pair<double, double> compare_topology(const EdgeList& estimated, const EdgeList& truth);

/// One "source,destination,strength" line per edge under a header line.
void write_edge_list(const EdgeList& edges, std::ostream& out);
EdgeList read_edge_list(std::istream& in);

}  // namespace nlvar
