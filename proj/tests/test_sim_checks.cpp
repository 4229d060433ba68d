#include <doctest.h>

#include <random>

#include "csma/sim_checks.hpp"
#include "helpers.hpp"

using namespace csma;

TEST_CASE("KS statistic against the brute-force definition") {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> ex(2.0);
  for (int n : {1, 5, 50, 400}) {
    std::vector<double> xs;
    for (int k = 0; k < n; ++k) xs.push_back(ex(rng));
    auto cdf = [](double t) { return oracle::residual_exponential(t, 0.5); };
    CHECK(ks_statistic(xs, cdf) == doctest::Approx(oracle::ks(xs, cdf)).epsilon(1e-12));
  }
  CHECK(ks_statistic({}, [](double) { return 0.0; }) == 0.0);
  CHECK(ks_statistic({0.5}, [](double t) { return t; }) == doctest::Approx(0.5));
}

TEST_CASE("single-link transition rates") {
  const auto g = data_graph("single");
  SimConfig c;
  c.stop = StopCondition::events(400'000);
  const auto st = simulate_forward(g, DurationDistribution::exponential(0.186),
                                   DurationDistribution::exponential(1.0), c).stats;
  const auto r = empirical_rates(st);
  CHECK(r.omitted.empty());
  const auto off = SystemState::from_string("0"), on = SystemState::from_string("1");
  CHECK(r.rates.at({off, on}) == doctest::Approx(1 / 0.186).epsilon(0.02));
  CHECK(r.rates.at({on, off}) == doctest::Approx(1.0).epsilon(0.02));
  const auto rev = reversibility_check(st);
  REQUIRE(rev.pairs.size() == 1);
  CHECK(rev.pairs[0].left == off);
  CHECK(rev.max_pair_imbalance <= 1.0 / rev.pairs[0].up + 1e-15);
}

TEST_CASE("rates from hand-built statistics") {
  TraceStats st;
  const auto a = SystemState::from_string("00"), b = SystemState::from_string("10"), z = SystemState::from_string("01");
  st.total_time = 10.0;
  st.occupancy[a] = 4.0;
  st.occupancy[b] = 6.0;
  st.transition_counts[{a, b}] = 8;
  st.transition_counts[{b, a}] = 6;
  st.transition_counts[{z, a}] = 1;  // source never occupied
  const auto r = empirical_rates(st);
  CHECK(r.rates.at({a, b}) == 2.0);
  CHECK(r.rates.at({b, a}) == 1.0);
  REQUIRE(r.omitted.size() == 1);
  CHECK(r.omitted[0].first == z);
  const auto rev = reversibility_check(st);
  CHECK(rev.pairs.size() == 2);
  CHECK(rev.max_pair_imbalance == doctest::Approx(1.0));  // a->z never observed, z->a once
  CHECK(st.occupancy_fraction(b) == 0.6);
  CHECK(st.occupancy_fraction(z) == 0.0);
}

TEST_CASE("residual report on a short run is flagged insufficient") {
  const auto g = data_graph("g1");
  SimConfig c;
  c.stop = StopCondition::events(10);
  c.warmup_events = 0;
  c.record_residuals = true;
  const auto law = DurationDistribution::exponential(0.186);
  const auto rep = residual_invariance_check(simulate_forward(g, law, law, c).stats, law, law);
  CHECK_FALSE(rep.sufficient);
  CHECK(rep.countdown_samples > 0);
}
