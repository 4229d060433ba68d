#pragma once

#include <string>
#include <vector>

#include "csma/contention_graph.hpp"
#include "oracles.hpp"

inline csma::ContentionGraph make_graph(int L, const oracle::Edges& edges) {
  std::vector<std::string> labels;
  for (int i = 1; i <= L; ++i) labels.push_back(std::to_string(i));
  std::vector<csma::ContentionGraph::Edge> e;
  for (auto [a, b] : edges) e.emplace_back(a, b);
  return csma::ContentionGraph(labels, e);
}

inline csma::ContentionGraph data_graph(const std::string& name) {
  return csma::parse_graph(oracle::read_file(std::string(TEST_DATA_DIR) + "/" + name + ".json"));
}

inline std::vector<std::uint64_t> masks(const std::vector<csma::SystemState>& states) {
  std::vector<std::uint64_t> out;
  for (const auto& s : states) out.push_back(s.bits());
  return out;
}
