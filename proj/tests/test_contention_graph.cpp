#include <doctest.h>

#include <algorithm>
#include <random>

#include "csma/contention_graph.hpp"
#include "csma/error.hpp"
#include "helpers.hpp"

using namespace csma;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_graph_document(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("document parsed without error: " << text);
  return ErrorCode::malformed_document;
}

}  // namespace

TEST_CASE("graph document parsing") {
  const auto g = parse_graph(R"({"links": ["1","2","3","4"], "edges": [["1","2"],["2","3"],["2","4"],["3","4"]]})");
  CHECK(g.size() == 4);
  CHECK(g.edges() == std::vector<ContentionGraph::Edge>{{0, 1}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(g.label(2) == "3");
  CHECK(g.degree(1) == 3);
  CHECK(g.max_degree() == 3);

  const auto one = parse_graph(R"({"links": ["a"], "edges": []})");
  CHECK(one.size() == 1);
  CHECK(one.edges().empty());

  SUBCASE("duplicate edges are merged") {
    const auto d = parse_graph(R"({"links": ["a","b"], "edges": [["a","b"],["b","a"]]})");
    CHECK(d.edges().size() == 1);
  }
  SUBCASE("c field") {
    const auto scalar = parse_graph_document(R"({"links": ["a","b"], "edges": [], "c": 0.5})");
    REQUIRE(scalar.c);
    CHECK(*scalar.c == std::vector<double>{0.5, 0.5});
    CHECK(scalar.c_uniform);
    const auto map = parse_graph_document(R"({"links": ["a","b"], "edges": [], "c": {"b": 2, "a": 1}})");
    REQUIRE(map.c);
    CHECK(*map.c == std::vector<double>{1.0, 2.0});
  }
  SUBCASE("errors") {
    CHECK(parse_error(R"({"links": ["1"], "edges": [["1","1"]]})") == ErrorCode::self_edge);
    CHECK(parse_error(R"({"links": ["1","1"], "edges": []})") == ErrorCode::duplicate_label);
    CHECK(parse_error(R"({"links": ["1"], "edges": [["1","9"]]})") == ErrorCode::unknown_label);
    CHECK(parse_error(R"({"links": [], "edges": []})") == ErrorCode::empty_graph);
    CHECK(parse_error(R"({"links": ["1"]} trailing)") == ErrorCode::malformed_document);
    CHECK(parse_error(R"({"links": ["1","2"], "edges": [], "c": {"1": 1}})") == ErrorCode::malformed_document);
    CHECK(parse_error(R"({"links": ["1"], "edges": [["1"]]})") == ErrorCode::malformed_document);
  }
}

TEST_CASE("more than 64 links is rejected") {
  std::vector<std::string> labels;
  for (int i = 0; i < 65; ++i) labels.push_back(std::to_string(i));
  CHECK_THROWS_AS(ContentionGraph(labels, {}), Error);
}

TEST_CASE("system state text and canonical order") {
  const auto s = SystemState::from_string("1010");
  CHECK(s.size() == 4);
  CHECK(s.test(0));
  CHECK_FALSE(s.test(1));
  CHECK(s.to_string() == "1010");
  CHECK(s.popcount() == 2);
  CHECK(hamming_distance(s, SystemState::from_string("1001")) == 2);

  std::vector<SystemState> v;
  for (const char* t : {"1001", "0000", "0001", "1010", "1000", "0100", "0010"}) v.push_back(SystemState::from_string(t));
  std::sort(v.begin(), v.end());
  std::vector<std::string> got;
  for (const auto& x : v) got.push_back(x.to_string());
  CHECK(got == std::vector<std::string>{"0000", "1000", "0100", "0010", "0001", "1010", "1001"});
}

TEST_CASE("G1 feasible states and maximum sets") {
  const auto g = make_graph(4, oracle::g1_edges());
  const auto fs = feasible_states(g);
  CHECK(fs.size() == 7);
  const auto mis = maximum_independent_sets(g);
  REQUIRE(mis.size() == 2);
  CHECK(mis[0].to_string() == "1010");
  CHECK(mis[1].to_string() == "1001");
  CHECK(maximal_independent_sets(g).size() == 3);  // 0100 is maximal but not maximum
}

TEST_CASE("connected states and the transition graph") {
  const auto g = make_graph(4, oracle::g1_edges());
  CHECK(connected_states(SystemState::from_string("1000"), SystemState::from_string("1010"), g));
  CHECK(connected_states(SystemState::from_string("1010"), SystemState::from_string("1000"), g));
  CHECK_FALSE(connected_states(SystemState::from_string("1010"), SystemState::from_string("1001"), g));
  CHECK_FALSE(connected_states(SystemState::from_string("0000"), SystemState::from_string("0000"), g));
  CHECK_THROWS_AS(connected_states(SystemState::from_string("1100"), SystemState::from_string("1000"), g), Error);
  // Brute force gives 8 connected pairs on this graph.
  const auto t = transition_graph(g);
  CHECK(t.size() == 8);
  for (const auto& tr : t) {
    CHECK(tr.right.popcount() == tr.left.popcount() + 1);
    CHECK(tr.right.bits() == (tr.left.bits() | (std::uint64_t{1} << tr.toggled_link)));
  }
}

TEST_CASE("enumeration cap") {
  const auto g = make_graph(30, {});
  CHECK_THROWS_AS(feasible_states(g, EnumerationLimits{1000}), Error);
}

TEST_CASE("property: enumeration matches brute force on random graphs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int L = 1 + static_cast<int>(rng() % 10);
    const double p = (rng() % 100) / 100.0;
    const auto edges = oracle::random_edges(L, p, rng);
    const auto g = make_graph(L, edges);
    CAPTURE(oracle::document(L, edges));

    auto want = oracle::independent_sets(L, edges);
    auto got = masks(feasible_states(g));
    std::sort(got.begin(), got.end());
    CHECK(got == want);

    auto want_maximal = oracle::maximal_sets(L, edges);
    auto got_maximal = masks(maximal_independent_sets(g));
    std::sort(got_maximal.begin(), got_maximal.end());
    CHECK(got_maximal == want_maximal);

    auto want_max = oracle::maximum_sets(L, edges);
    auto got_max = masks(maximum_independent_sets(g));
    std::sort(got_max.begin(), got_max.end());
    CHECK(got_max == want_max);

    // Transition graph: one entry per feasible state and per addable link.
    std::size_t pairs = 0;
    for (auto m : want) {
      for (int i = 0; i < L; ++i) pairs += !(m >> i & 1) && oracle::independent(m | std::uint64_t{1} << i, edges);
    }
    CHECK(transition_graph(g).size() == pairs);

    // Canonical order is strict and consistent with sort.
    const auto fs = feasible_states(g);
    CHECK(std::is_sorted(fs.begin(), fs.end()));
    CHECK(std::adjacent_find(fs.begin(), fs.end()) == fs.end());
  }
}
