#pragma once

// Empirical estimators over simulation statistics: transition rates,
// pairwise reversibility and residual-life goodness of fit.

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "csma/duration.hpp"
#include "csma/telegraph_sim.hpp"

namespace csma {

/// One-sample Kolmogorov-Smirnov statistic sup |F_n(t) - F(t)|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct EmpiricalRates {
  /// p_{ss'} = n_{ss'} / occupancy_s.
  std::map<std::pair<SystemState, SystemState>, double> rates;
  /// Pairs whose source state was never occupied after warm-up.
  std::vector<std::pair<SystemState, SystemState>> omitted;
};

EmpiricalRates empirical_rates(const TraceStats& stats);

struct PairImbalance {
  SystemState left;   // fewer transmitters
  SystemState right;
  std::uint64_t up = 0;    // n_{left,right}
  std::uint64_t down = 0;  // n_{right,left}
  double imbalance = 0.0;  // |up - down| / max(up, 1)
};

struct ReversibilityReport {
  double max_pair_imbalance = 0.0;
  std::vector<PairImbalance> pairs;
};

ReversibilityReport reversibility_check(const TraceStats& stats);

struct ResidualReport {
  bool sufficient = false;  // every link contributed >= min_samples residuals
  double ks_countdown = 0.0;
  double ks_transmission = 0.0;
  double ks_countdown_unfreeze = 0.0;
  std::size_t countdown_samples = 0;
  std::size_t transmission_samples = 0;
  std::size_t unfreeze_samples = 0;
};

/// Pools residual samples over links and compares them with the
/// equilibrium residual CDF of the configured laws.
ResidualReport residual_invariance_check(const TraceStats& stats, const DurationDistribution& countdown,
                                         const DurationDistribution& transmission,
                                         std::size_t min_samples = 1000);

}  // namespace csma
