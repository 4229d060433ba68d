#pragma once

// Event-driven simulation of interacting on-off telegraph processes.
//
// Each link alternates countdown and transmission. A countdown runs only
// while no neighbour transmits; otherwise it is frozen and keeps its
// remaining time. Reaching zero starts a transmission (freezing actively
// counting neighbours); ending a transmission starts a fresh countdown and
// resumes neighbours that no longer hear any transmitter.
//
// Time is kept in integer ticks (2^-32 time units) so that the forward run
// and the reverse-time run perform exactly invertible arithmetic.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "csma/contention_graph.hpp"
#include "csma/duration.hpp"

namespace csma {

using Ticks = std::int64_t;
inline constexpr double kTicksPerUnit = 4294967296.0;  // 2^32

/// Rounds a duration to ticks; any positive duration maps to >= 1 tick.
Ticks to_ticks(double duration);
inline double to_time(Ticks t) { return static_cast<double>(t) / kTicksPerUnit; }

enum class LinkMode { transmission, active_countdown, frozen_countdown };

/// Exactly one of rc, rt is nonzero.
struct LinkRuntime {
  bool transmitting = false;
  Ticks rc = 0;
  Ticks rt = 0;

  bool operator==(const LinkRuntime&) const = default;
};

struct RuntimeSnapshot {
  Ticks time = 0;
  std::vector<LinkRuntime> links;

  bool operator==(const RuntimeSnapshot&) const = default;
};

/// Carrier-sense input is derived from neighbours, never stored.
LinkMode mode_of(const RuntimeSnapshot& snap, const ContentionGraph& g, std::size_t link);

/// Piecewise-constant S(t) on [0, T]: the state at t = 0 and every change
/// point (tick, new state) in time order.
struct StateTrace {
  SystemState initial;
  std::vector<std::pair<Ticks, SystemState>> changes;

  bool operator==(const StateTrace&) const = default;
};

/// Per-link drawn durations in ticks, in draw order: cd, tx, cd, tx, ...
using DrawLog = std::vector<std::vector<Ticks>>;

/// Reverses each link's sequence (the in-progress draw first).
DrawLog reversed(const DrawLog& draws);

struct ResidualSamples {
  std::vector<double> countdown;             // rc of actively counting links
  std::vector<double> transmission;          // rt of transmitting links
  std::vector<double> countdown_at_unfreeze; // rc of links resumed by the epoch
};

struct TraceStats {
  double total_time = 0.0;
  std::map<SystemState, double> occupancy;
  std::map<std::pair<SystemState, SystemState>, std::uint64_t> transition_counts;
  std::vector<ResidualSamples> residuals;  // per link; empty unless recorded
  std::uint64_t event_count = 0;
  std::uint64_t tie_count = 0;

  /// Summation merge of independent runs on the same graph.
  TraceStats& merge(const TraceStats& other);

  double occupancy_fraction(const SystemState& s) const;
  /// Fraction of time each link transmits.
  Eigen::VectorXd link_throughputs(std::size_t links) const;
};

struct StopCondition {
  std::optional<std::uint64_t> max_events;
  std::optional<double> max_time;

  static StopCondition events(std::uint64_t n) { return {n, std::nullopt}; }
  static StopCondition time(double t) { return {std::nullopt, t}; }
};

enum class TiePolicy { break_by_index, fail };

struct SimConfig {
  StopCondition stop = StopCondition::events(1'000'000);
  std::uint64_t seed = 1;
  /// Events discarded before statistics accumulate. Default:
  /// max(10 L events, 1% of the horizon).
  std::optional<std::uint64_t> warmup_events;
  TiePolicy ties = TiePolicy::break_by_index;
  bool record_residuals = false;
  bool record_trace = false;
  bool record_draws = false;
};

struct SimulationRun {
  TraceStats stats;
  RuntimeSnapshot end;
  std::optional<StateTrace> trace;
  DrawLog draws;  // empty unless record_draws
};

/// Forward-time run from t = 0 with every link starting a fresh countdown.
/// Processes every event with time <= horizon.
SimulationRun simulate_forward(const ContentionGraph& g, const DurationDistribution& countdown,
                               const DurationDistribution& transmission, const SimConfig& config);

/// Reverse-time run from end.time down to 0 driven by reversed draw
/// sequences (in-progress draw first). Given the end snapshot and the draws
/// of a forward run it reproduces that run's trace exactly. Statistics are
/// reported in forward-time orientation and cover the whole interval.
SimulationRun simulate_reverse(const ContentionGraph& g, const RuntimeSnapshot& end,
                               const DrawLog& reversed_draws, bool record_trace = true);

}  // namespace csma
