#include <doctest.h>

#include <numeric>
#include <random>

#include "csma/boe.hpp"
#include "csma/error.hpp"
#include "helpers.hpp"

using namespace csma;

TEST_CASE("BoE examples") {
  CHECK(boe_throughput(data_graph("g1")) == Eigen::Vector4d(1, 0, 0.5, 0.5));
  Eigen::VectorXd c5 = Eigen::VectorXd::Constant(5, 0.4);
  CHECK(boe_throughput(data_graph("c5")) == c5);
  Eigen::VectorXd t4(5);
  t4 << 0.75, 0.25, 0.25, 0.25, 0.5;
  CHECK(boe_throughput(data_graph("t4")) == t4);
  Eigen::VectorXd t6(6);
  t6 << 1, 0, 0, 1, 0, 1;
  CHECK(boe_throughput(data_graph("t6")) == t6);
  CHECK(boe_throughput(data_graph("single")) == Eigen::VectorXd::Ones(1));
  CHECK(boe_compute(data_graph("g1")).mis.size() == 2);
}

TEST_CASE("rate presets") {
  const auto b = find_preset("802.11b-UDP");
  REQUIRE(b);
  CHECK(to_bps(Eigen::VectorXd::Constant(1, 0.5), *b)[0] == doctest::Approx(3.03e6));
  const auto a = find_preset("802.11a-UDP");
  REQUIRE(a);
  CHECK(to_bps(Eigen::Vector2d(1, 0), *a) == Eigen::Vector2d(30.91e6, 0));
  const auto tcp = find_preset("802.11b-TCP");
  REQUIRE(tcp);
  CHECK(to_bps(Eigen::VectorXd::Constant(1, 0.4), *tcp)[0] == doctest::Approx(1.936e6));
  CHECK_FALSE(find_preset("token-ring"));
  CHECK(builtin_presets().size() == 3);
  CHECK_THROWS_AS(RatePreset("zero", 0.0), Error);
  CHECK(RatePreset("custom", 1e6).single_link_bps == 1e6);
}

TEST_CASE("property: BoE against brute force, sum and relabeling") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    const int L = 1 + static_cast<int>(rng() % 9);
    const auto edges = oracle::random_edges(L, (rng() % 100) / 100.0, rng);
    const auto g = make_graph(L, edges);
    const auto res = boe_compute(g);
    const auto want = oracle::boe(L, edges);
    for (int i = 0; i < L; ++i) CHECK(res.throughput[i] == doctest::Approx(want[i]).epsilon(1e-15));
    // Values sum to the common MIS size.
    CHECK(res.throughput.sum() == doctest::Approx(res.mis.front().popcount()));
    for (int i = 0; i < L; ++i) {
      CHECK(res.throughput[i] >= 0.0);
      CHECK(res.throughput[i] <= 1.0);
    }
    // Permuting link indices permutes the result.
    std::vector<int> perm(L);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    oracle::Edges moved;
    for (auto [a, b] : edges) moved.push_back({perm[a], perm[b]});
    const auto permuted = boe_throughput(make_graph(L, moved));
    for (int i = 0; i < L; ++i) CHECK(permuted[perm[i]] == res.throughput[i]);
  }
}
