#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nlvar/rng.hpp"
#include "nlvar/topology.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace nlvar;

TEST_CASE("extract_topology") {
  SUBCASE("zero tensor, zero threshold: no edges") {
    CHECK(extract_topology(VarCoefficients::zero(2, 3), 0.0).edges.empty());
  }
  SUBCASE("identity gives exactly the self-loops") {
    VarCoefficients var = VarCoefficients::zero(1, 4);
    var.lags[0] = Eigen::MatrixXd::Identity(4, 4);
    const EdgeList edges = extract_topology(var, 0.5);
    REQUIRE(edges.edges.size() == 4);
    for (const auto& e : edges.edges) {
      CHECK(e.source == e.destination);
      CHECK(e.strength == 1.0);
    }
  }
  SUBCASE("matches a brute-force max-over-lags scan") {
    RandomStream rng(71);
    VarCoefficients var = VarCoefficients::zero(3, 4);
    for (auto& lag : var.lags) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) lag(i, j) = rng.gaussian();
      }
    }
    const double threshold = 0.8;
    const EdgeList edges = extract_topology(var, threshold);
    std::set<std::pair<int, int>> found;
    for (const auto& e : edges.edges) {
      found.emplace(e.source, e.destination);
      double expected = 0.0;
      for (int q = 0; q < 3; ++q) {
        expected = std::max(expected, std::abs(var.lags[static_cast<std::size_t>(q)](e.destination, e.source)));
      }
      CHECK(e.strength == expected);
    }
    for (int source = 0; source < 4; ++source) {
      for (int dest = 0; dest < 4; ++dest) {
        double strength = 0.0;
        for (int q = 0; q < 3; ++q) {
          strength = std::max(strength, std::abs(var.lags[static_cast<std::size_t>(q)](dest, source)));
        }
        CHECK(found.count({source, dest}) == (strength > threshold ? 1u : 0u));
      }
    }
  }
  SUBCASE("edge sets are nested as the threshold grows") {
    RandomStream rng(72);
    VarCoefficients var = VarCoefficients::zero(2, 5);
    for (auto& lag : var.lags) {
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) lag(i, j) = rng.gaussian();
      }
    }
    std::size_t previous = 1000;
    for (double threshold : {0.0, 0.3, 0.7, 1.2, 2.5}) {
      const EdgeList edges = extract_topology(var, threshold);
      std::set<std::pair<int, int>> current;
      for (const auto& e : edges.edges) current.emplace(e.source, e.destination);
      CHECK(current.size() <= previous);
      previous = current.size();
    }
  }
}

TEST_CASE("compare_topology") {
  const auto edge = [](int s, int d) { return Edge{s, d, 1.0}; };
  SUBCASE("identical lists") {
    EdgeList a;
    a.edges = {edge(0, 1), edge(1, 2)};
    const auto [precision, recall] = compare_topology(a, a);
    CHECK(precision == 1.0);
    CHECK(recall == 1.0);
  }
  SUBCASE("empty estimate, nonempty truth") {
    EdgeList truth;
    truth.edges = {edge(0, 1)};
    const auto [precision, recall] = compare_topology(EdgeList{}, truth);
    CHECK(precision == 0.0);
    CHECK(recall == 0.0);
  }
  SUBCASE("both empty") {
    const auto [precision, recall] = compare_topology(EdgeList{}, EdgeList{});
    CHECK(precision == 1.0);
    CHECK(recall == 1.0);
  }
  SUBCASE("half overlap") {
    EdgeList estimated;
    estimated.edges = {edge(0, 1), edge(1, 2)};
    EdgeList truth;
    truth.edges = {edge(1, 2), edge(2, 0)};
    const auto [precision, recall] = compare_topology(estimated, truth);
    CHECK(precision == 0.5);
    CHECK(recall == 0.5);
  }
  SUBCASE("strengths are ignored") {
    EdgeList a;
    a.edges = {Edge{0, 1, 0.2}};
    EdgeList b;
    b.edges = {Edge{0, 1, 99.0}};
    const auto [precision, recall] = compare_topology(a, b);
    CHECK(precision == 1.0);
    CHECK(recall == 1.0);
  }
}

TEST_CASE("edge list serialization round trip") {
  EdgeList edges;
  edges.edges = {Edge{1, 0, 0.25}, Edge{0, 2, 1.0 / 3.0}, Edge{0, 1, 0.5}};
  std::stringstream stream;
  write_edge_list(edges, stream);

  const std::string text = stream.str();
  CHECK(text.rfind("source,destination,strength\n", 0) == 0);
  // source-major ordering
  CHECK(text.find("0,1,") < text.find("0,2,"));
  CHECK(text.find("0,2,") < text.find("1,0,"));

  std::stringstream replay(text);
  const EdgeList parsed = read_edge_list(replay);
  REQUIRE(parsed.edges.size() == 3);
  CHECK(parsed.edges[0].source == 0);
  CHECK(parsed.edges[0].destination == 1);
  CHECK(parsed.edges[0].strength == 0.5);
  CHECK(parsed.edges[1].strength == 1.0 / 3.0);

  std::stringstream bad("nonsense\n");
  CHECK_THROWS_AS(read_edge_list(bad), ValidationError);
}
