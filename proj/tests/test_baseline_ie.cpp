#include <doctest.h>

#include "csma/baseline_ie.hpp"
#include "csma/error.hpp"
#include "csma/exact_chain.hpp"
#include "helpers.hpp"

using namespace csma;

TEST_CASE("residual examples") {
  const auto g1 = data_graph("g1");
  const auto w = oracle::g1_closed_form(0.186);
  const IEProblem p{g1, 0.186};
  const auto r = ie_residual(Eigen::Vector4d(w.x1, w.x2, w.x3, w.x3), p);
  CHECK(r.cwiseAbs().maxCoeff() < 1e-12);

  const auto one = data_graph("single");
  CHECK(ie_residual(Eigen::VectorXd::Constant(1, 1 / 1.186), IEProblem{one, 0.186})[0] == doctest::Approx(0.0));

  const auto k3 = data_graph("k3");
  for (double a : {0.1, 0.3, 0.5}) {
    const auto rk = ie_residual(Eigen::Vector3d::Constant(a), IEProblem{k3, 0.186});
    CHECK(rk[0] == doctest::Approx(1.186 * a + 2 * a - 1));
  }
  try {
    ie_residual(Eigen::Vector4d(1.0, 0, 0, 0), p);
    FAIL("expected invalid point");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_point);
  }
}

TEST_CASE("closed-form solutions") {
  for (double c = 0.05; c <= 10.0; c *= 1.7) {
    CAPTURE(c);
    const auto s1 = solve_fixed_point(IEProblem{data_graph("single"), c});
    CHECK(s1.converged);
    CHECK(s1.x[0] == doctest::Approx(1 / (1 + c)).epsilon(1e-9));
    const auto s3 = solve_fixed_point(IEProblem{data_graph("k3"), c});
    CHECK(s3.converged);
    for (int i = 0; i < 3; ++i) CHECK(s3.x[i] == doctest::Approx(1 / (3 + c)).epsilon(1e-9));
  }
}

TEST_CASE("G1 and P5 agree with the exact chain") {
  // Every observer separates its non-adjacent neighbour pairs on these graphs.
  for (std::string name : {"g1", "p5", "k3"}) {
    CAPTURE(name);
    const auto g = data_graph(name);
    const auto sol = solve_fixed_point(IEProblem{g, 0.186});
    CHECK(sol.converged);
    CHECK(sol.residual < 1e-10);
    CHECK((sol.x.array() >= 0).all());
    CHECK((sol.x.array() <= 1).all());
    const auto exact = link_throughputs(stationary_distribution(g, AccessParams::uniform(g.size(), 0.186)), g);
    CHECK((sol.x - exact).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  const auto sol = solve_fixed_point(IEProblem{data_graph("c5"), 0.186, 0.5, 1e-10, 3});
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 3);
  CHECK_THROWS_AS(solve_fixed_point(IEProblem{data_graph("g1"), 0.186, 0.0}), Error);
  CHECK_THROWS_AS(solve_fixed_point(IEProblem{data_graph("g1"), -1.0}), Error);
}

TEST_CASE("approximation error where neighbours are not separated") {
  // On C5 the two neighbours of a link stay connected around the cycle.
  const auto g = data_graph("c5");
  const auto sol = solve_fixed_point(IEProblem{g, 0.186});
  CHECK(sol.converged);
  const auto exact = link_throughputs(stationary_distribution(g, AccessParams::uniform(5, 0.186)), g);
  CHECK((sol.x - exact).cwiseAbs().maxCoeff() > 1e-3);
}
