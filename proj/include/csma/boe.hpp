#pragma once

// Back-of-the-envelope throughput: the share of maximum independent sets in
// which each link appears.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csma/contention_graph.hpp"

namespace csma {

/// Per-link normalized throughput (airtime fraction in [0, 1]).
using ThroughputVector = Eigen::VectorXd;

struct BoeResult {
  ThroughputVector throughput;
  std::vector<SystemState> mis;
};

BoeResult boe_compute(const ContentionGraph& g, const EnumerationLimits& limits = {});

/// value[i] = (# maximum independent sets containing i) / (# maximum independent sets)
ThroughputVector boe_throughput(const ContentionGraph& g, const EnumerationLimits& limits = {});

/// Throughput of an isolated saturated link.
struct RatePreset {
  std::string name;
  double single_link_bps;

  RatePreset(std::string name, double single_link_bps);
};

/// 802.11b-UDP 6.06 Mbps, 802.11a-UDP 30.91 Mbps, 802.11b-TCP 4.84 Mbps.
const std::vector<RatePreset>& builtin_presets();
std::optional<RatePreset> find_preset(std::string_view name);

Eigen::VectorXd to_bps(const ThroughputVector& tv, const RatePreset& preset);

}  // namespace csma
