#pragma once

// Inclusion-exclusion fixed-point throughput approximation (comparison
// baseline). Each observer i sees its own airtime, its countdown overhead
// and its neighbours' airtime; overlaps of non-adjacent neighbour pairs are
// approximated to second order by x_j x_k / (1 - x_i).

#include <Eigen/Dense>
#include <optional>

#include "csma/boe.hpp"
#include "csma/contention_graph.hpp"

namespace csma {

struct IEProblem {
  ContentionGraph graph;
  double c = 0.0;
  double damping = 0.5;
  double tol = 1e-10;
  long max_iter = 100'000;

  void validate() const;
};

/// residual_i = c x_i + x_i + sum_{N_i} x_j - sum_{pairs} x_j x_k / (1 - x_i) - 1
Eigen::VectorXd ie_residual(const ThroughputVector& x, const IEProblem& problem);

struct IESolution {
  ThroughputVector x;
  long iterations = 0;
  bool converged = false;
  double residual = 0.0;  // infinity norm at x
};

/// Damped iteration of the per-link closed-form update. Non-convergence is
/// reported through the flag, never thrown.
IESolution solve_fixed_point(const IEProblem& problem, const std::optional<ThroughputVector>& x0 = std::nullopt);

}  // namespace csma
