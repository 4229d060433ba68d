#pragma once

// Cross-method comparison, starvation and island-state detection, and
// calibration of heterogeneous countdown overheads.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "csma/baseline_ie.hpp"
#include "csma/boe.hpp"
#include "csma/contention_graph.hpp"
#include "csma/exact_chain.hpp"
#include "csma/telegraph_sim.hpp"

namespace csma {

struct CompareConfig {
  std::uint64_t events = 1'000'000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> warmup_events;
  /// Defaults: exponential with mean c (countdown) and 1 (transmission).
  std::optional<DurationDistribution> countdown;
  std::optional<DurationDistribution> transmission;
};

/// One method's result, or the reason it is absent.
struct MethodColumn {
  std::optional<ThroughputVector> throughput;
  std::optional<double> deviation;  // max |x - exact|
  std::string error;

  bool present() const { return throughput.has_value(); }
};

struct ComparisonReport {
  explicit ComparisonReport(AccessParams p) : params(std::move(p)) {}

  MethodColumn boe, exact, simulation, baseline;
  AccessParams params;
  std::uint64_t seed = 0;
  std::uint64_t events = 0;
  std::uint64_t sim_tie_count = 0;
  std::string countdown, transmission;  // laws used by the simulation
  bool baseline_converged = false;
  long baseline_iterations = 0;
};

ComparisonReport compare_methods(const ContentionGraph& g, const AccessParams& params,
                                 const CompareConfig& config = {});

/// Labels of links with throughput below the threshold, in link order.
std::vector<std::string> starvation_report(const ThroughputVector& tv, const ContentionGraph& g,
                                           double threshold = 0.05);

struct IslandReport {
  std::vector<SystemState> mis;
  Eigen::MatrixXi distance;   // pairwise Hamming distances
  int max_min_distance = 0;   // largest nearest-other-MIS distance; 0 with one MIS
  int bar = 4;
  bool flagged = false;       // max_min_distance >= bar
};

IslandReport island_report(const ContentionGraph& g, int bar = 4, const EnumerationLimits& limits = {});

struct CalibrationResult {
  explicit CalibrationResult(AccessParams p) : params(std::move(p)) {}

  AccessParams params;
  ThroughputVector achieved;
  double residual = 0.0;  // max |achieved - target|
  bool converged = false; // search step shrank to its floor before the budget ran out
  long iterations = 0;
};

/// Multiplicative coordinate search over per-link c with min_i c_i = c_floor,
/// minimizing the squared error; the max-norm residual is reported.
CalibrationResult calibrate_c(const ContentionGraph& g, const ThroughputVector& target, double c_floor,
                              long max_iter = 2000, const EnumerationLimits& limits = {});

struct IslandSojourns {
  std::vector<SystemState> mis;
  std::vector<std::uint64_t> sojourns;  // completed stays per MIS
  std::vector<double> mean_duration;    // mean length of those stays
};

/// Splits a trace into stays attributed to the maximum independent set most
/// recently visited; a stay ends when a different one is entered. The stay
/// still open at the end of the trace is not counted.
IslandSojourns island_sojourns(const StateTrace& trace, const ContentionGraph& g,
                               const EnumerationLimits& limits = {});

}  // namespace csma
