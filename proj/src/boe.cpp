#include "csma/boe.hpp"

#include "csma/error.hpp"

namespace csma {

BoeResult boe_compute(const ContentionGraph& g, const EnumerationLimits& limits) {
  BoeResult out{ThroughputVector::Zero(static_cast<Eigen::Index>(g.size())),
                maximum_independent_sets(g, limits)};
  for (const auto& s : out.mis) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (s.test(i)) out.throughput[static_cast<Eigen::Index>(i)] += 1.0;
    }
  }
  out.throughput /= static_cast<double>(out.mis.size());
  return out;
}

ThroughputVector boe_throughput(const ContentionGraph& g, const EnumerationLimits& limits) {
  return boe_compute(g, limits).throughput;
}

RatePreset::RatePreset(std::string n, double bps) : name(std::move(n)), single_link_bps(bps) {
  if (!(bps > 0.0)) throw Error(ErrorCode::invalid_parameter, "single-link throughput must be positive");
}

const std::vector<RatePreset>& builtin_presets() {
  static const std::vector<RatePreset> presets{
      {"802.11b-UDP", 6.06e6},
      {"802.11a-UDP", 30.91e6},
      {"802.11b-TCP", 4.84e6},
  };
  return presets;
}

std::optional<RatePreset> find_preset(std::string_view name) {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

Eigen::VectorXd to_bps(const ThroughputVector& tv, const RatePreset& preset) {
  return tv * preset.single_link_bps;
}

}  // namespace csma
