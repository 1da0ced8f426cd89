#include "nlvar/topology.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace nlvar {

EdgeList extract_topology(const VarCoefficients& var, double threshold) {
  validate(var);
  if (threshold < 0.0) throw ValidationError("extract_topology: threshold must be >= 0");
  const int n = var.n_nodes();
  EdgeList out;
  for (int source = 0; source < n; ++source) {
    for (int dest = 0; dest < n; ++dest) {
      double strength = 0.0;
      for (const auto& lag : var.lags) {
        strength = std::max(strength, std::abs(lag(dest, source)));
      }
      if (strength > threshold) out.edges.push_back(Edge{source, dest, strength});
    }
  }
  return out;
}

std::pair<double, double> compare_topology(const EdgeList& estimated, const EdgeList& truth) {
  std::set<std::pair<int, int>> est;
  std::set<std::pair<int, int>> tru;
  for (const auto& e : estimated.edges) est.emplace(e.source, e.destination);
  for (const auto& e : truth.edges) tru.emplace(e.source, e.destination);
  std::size_t hits = 0;
  for (const auto& e : est) hits += tru.count(e);

  double precision;
  if (est.empty()) {
    precision = tru.empty() ? 1.0 : 0.0;
  } else {
    precision = static_cast<double>(hits) / static_cast<double>(est.size());
  }
  const double recall =
      tru.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(tru.size());
  return {precision, recall};
}

void write_edge_list(const EdgeList& edges, std::ostream& out) {
  std::vector<Edge> sorted = edges.edges;
  std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.destination < b.destination;
  });
  out << "source,destination,strength\n";
  for (const auto& e : sorted) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", e.strength);
    out << e.source << ',' << e.destination << ',' << buf << '\n';
  }
}

EdgeList read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "source,destination,strength") {
    throw ValidationError("edge list: missing or malformed header line");
  }
  EdgeList out;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Edge e;
    char c1 = 0;
    char c2 = 0;
    if (!(fields >> e.source >> c1 >> e.destination >> c2 >> e.strength) || c1 != ',' || c2 != ',') {
      throw ValidationError("edge list: malformed line " + std::to_string(line_no));
    }
    out.edges.push_back(e);
  }
  return out;
}

}  // namespace nlvar
