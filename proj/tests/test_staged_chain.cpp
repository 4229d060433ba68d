#include <doctest.h>

#include "csma/error.hpp"
#include "csma/staged_chain.hpp"
#include "helpers.hpp"

using namespace csma;

namespace {

// Stationary probability of an expanded state: the product-form probability
// of its transmit bits times, per link, P(stage count) / E[stage count]
// (each remaining-stage index is equally likely).
double staged_oracle(const StagedState& x, const StateDistribution& marginal, const StagedChainSpec& spec) {
  double p = marginal.probability(transmission_state(x));
  for (const auto& l : x) {
    const auto& law = l.transmitting ? spec.transmit_stages : spec.countdown_stages;
    const double mean = l.transmitting ? spec.mean_transmit_stages() : spec.mean_countdown_stages();
    p *= law.at(l.stages) / mean;
  }
  return p;
}

}  // namespace

TEST_CASE("one stage each reproduces the product form") {
  const auto g = data_graph("g1");
  const auto sol = staged_stationary(g, StagedChainSpec::gamma(1, 1, 0.186, 1.0));
  CHECK(sol.states.size() == 7);
  const auto want = oracle::g1_closed_form(0.186);
  CHECK(sol.marginal.probability(SystemState::from_string("0000")) == doctest::Approx(want.idle).epsilon(1e-12));
  CHECK(sol.marginal.probability(SystemState::from_string("1010")) == doctest::Approx(want.pair).epsilon(1e-12));
}

TEST_CASE("fixed stage counts match the closed form per expanded state") {
  const auto g = data_graph("g1");
  const auto spec = StagedChainSpec::gamma(2, 2, 0.093, 0.5);
  CHECK(spec.countdown_overhead() == doctest::Approx(0.186));
  const auto sol = staged_stationary(g, spec);
  CHECK(sol.residual < 1e-12);
  const auto want = oracle::g1_closed_form(0.186);
  const double B = want.idle;
  for (std::size_t k = 0; k < sol.states.size(); ++k) {
    const int n = transmission_state(sol.states[k]).popcount();
    // B / y^L * (e/d)^n
    const double closed = B / 16.0 * std::pow(0.5 / 0.093, n);
    CHECK(sol.probabilities[static_cast<Eigen::Index>(k)] == doctest::Approx(closed).epsilon(1e-10));
  }
  CHECK(format_staged_state(sol.states.front(), false).size() == 9);
}

TEST_CASE("mixture stage laws marginalize to the product form") {
  for (const char* name : {"g1", "c5", "star"}) {
    CAPTURE(name);
    const auto g = data_graph(name);
    const StagedChainSpec spec{{{1, 0.5}, {3, 0.5}}, {{1, 0.25}, {2, 0.75}}, 0.093, 1.0 / 1.75};
    const auto sol = staged_stationary(g, spec);
    const auto exact = stationary_distribution(g, AccessParams::uniform(g.size(), spec.countdown_overhead()));
    for (const auto& s : exact.states()) {
      CHECK(sol.marginal.probability(s) == doctest::Approx(exact.probability(s)).epsilon(1e-10));
    }
    for (std::size_t k = 0; k < sol.states.size(); ++k) {
      CHECK(sol.probabilities[static_cast<Eigen::Index>(k)] ==
            doctest::Approx(staged_oracle(sol.states[k], exact, spec)).epsilon(1e-9));
    }
  }
}

TEST_CASE("staged spec validation and cap") {
  CHECK_THROWS_AS(StagedChainSpec::gamma(0, 1, 1, 1), Error);
  CHECK_THROWS_AS(StagedChainSpec::gamma(1, 1, -1, 1), Error);
  const StagedChainSpec bad{{{1, 0.5}}, {{1, 1.0}}, 1, 1};
  CHECK_THROWS_AS(bad.validate(), Error);
  try {
    staged_stationary(data_graph("c6"), StagedChainSpec::gamma(5, 5, 0.1, 0.2), EnumerationLimits{1000});
    FAIL("expected the cap to trigger");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::too_large);
  }
}
