#include "csma/baseline_ie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csma/error.hpp"

namespace csma {

void IEProblem::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::invalid_parameter, "c must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw Error(ErrorCode::invalid_parameter, "damping must be in (0, 1]");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_parameter, "tol must be positive");
  if (max_iter < 1) throw Error(ErrorCode::invalid_parameter, "max_iter must be positive");
}

namespace {

// sum over neighbours, and sum over unordered non-adjacent neighbour pairs of x_j x_k.
std::pair<double, double> neighbour_sums(const ContentionGraph& g, const ThroughputVector& x, std::size_t i) {
  const auto nb = g.neighbors(i);
  double single = 0.0, pairs = 0.0;
  for (std::size_t a = 0; a < nb.size(); ++a) {
    single += x[static_cast<Eigen::Index>(nb[a])];
    for (std::size_t b = a + 1; b < nb.size(); ++b) {
      if (!g.adjacent(nb[a], nb[b])) {
        pairs += x[static_cast<Eigen::Index>(nb[a])] * x[static_cast<Eigen::Index>(nb[b])];
      }
    }
  }
  return {single, pairs};
}

}  // namespace

Eigen::VectorXd ie_residual(const ThroughputVector& x, const IEProblem& problem) {
  const auto& g = problem.graph;
  if (static_cast<std::size_t>(x.size()) != g.size()) {
    throw Error(ErrorCode::invalid_parameter, "point has the wrong number of links");
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] < 1.0) || !(x[i] >= 0.0)) throw Error(ErrorCode::invalid_point, "components must lie in [0, 1)");
  }
  Eigen::VectorXd r(x.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const auto [single, pairs] = neighbour_sums(g, x, i);
    r[k] = problem.c * x[k] + x[k] + single - pairs / (1.0 - x[k]) - 1.0;
  }
  return r;
}

IESolution solve_fixed_point(const IEProblem& problem, const std::optional<ThroughputVector>& x0) {
  problem.validate();
  const auto& g = problem.graph;
  const auto L = static_cast<Eigen::Index>(g.size());
  IESolution out;
  out.x = x0 ? *x0 : ThroughputVector::Constant(L, 1.0 / (1.0 + problem.c + static_cast<double>(g.max_degree())));
  out.residual = ie_residual(out.x, problem).cwiseAbs().maxCoeff();
  constexpr double kCeiling = 1.0 - 1e-12;

  while (out.residual >= problem.tol && out.iterations < problem.max_iter) {
    ThroughputVector update(L);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const auto [single, pairs] = neighbour_sums(g, out.x, i);
      update[k] = (1.0 - single + pairs / (1.0 - out.x[k])) / (1.0 + problem.c);
    }
    out.x += problem.damping * (update - out.x);
    out.x = out.x.cwiseMax(0.0).cwiseMin(kCeiling);
    ++out.iterations;
    if (!out.x.allFinite()) {
      out.residual = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    out.residual = ie_residual(out.x, problem).cwiseAbs().maxCoeff();
  }
  out.converged = out.residual < problem.tol;
  return out;
}

}  // namespace csma
