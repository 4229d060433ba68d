#pragma once

// Expanded continuous-time Markov chain with gamma (Erlang) and
// mixture-of-gamma countdown/transmission times.
//
// Each link carries its transmit bit, the stage count drawn when the current
// period began, and the number of remaining stages. Stages complete at rate
// 1/d (countdown) or 1/e (transmission); a countdown is frozen, stage held,
// while any neighbour transmits. Completing the last stage draws a fresh
// stage count for the next period from P_Y or P_Z.

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "csma/contention_graph.hpp"
#include "csma/exact_chain.hpp"

namespace csma {

/// Stage count -> probability.
using StageLaw = std::map<int, double>;

struct StagedChainSpec {
  StageLaw countdown_stages;   // P_Y
  StageLaw transmit_stages;    // P_Z
  double countdown_stage_mean = 0.0;  // d
  double transmit_stage_mean = 0.0;   // e

  /// Fixed y countdown stages of mean d and z transmission stages of mean e.
  static StagedChainSpec gamma(int y, int z, double d, double e);

  double mean_countdown_stages() const;
  double mean_transmit_stages() const;
  double mean_countdown() const { return countdown_stage_mean * mean_countdown_stages(); }
  double mean_transmission() const { return transmit_stage_mean * mean_transmit_stages(); }
  double countdown_overhead() const { return mean_countdown() / mean_transmission(); }

  void validate() const;
};

struct StagedLinkState {
  bool transmitting = false;
  int stages = 1;     // y_i or z_i drawn for the current period
  int remaining = 1;  // rc_i or rt_i in 1..stages

  bool operator==(const StagedLinkState&) const = default;
};

using StagedState = std::vector<StagedLinkState>;

/// e.g. "1000|1121" for fixed stage counts; "1000|1:1,2:1,2:2,2:1" style
/// (stages:remaining per link) when stage counts vary.
std::string format_staged_state(const StagedState& x, bool show_stage_counts);

SystemState transmission_state(const StagedState& x);

struct StagedSolution {
  std::vector<StagedState> states;
  Eigen::VectorXd probabilities;
  StateDistribution marginal;
  double residual = 0.0;        // max |(pi Q)_k| at the returned pi
  bool used_power_iteration = false;
};

/// Builds the expanded generator and solves pi Q = 0, sum(pi) = 1 with a
/// sparse LU factorization; falls back to power iteration on the uniformized
/// chain when the direct residual exceeds 1e-10.
StagedSolution staged_stationary(const ContentionGraph& g, const StagedChainSpec& spec,
                                 const EnumerationLimits& limits = {});

}  // namespace csma
