#include "csma/sim_checks.hpp"

#include <algorithm>
#include <cmath>

namespace csma {

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = cdf(samples[k]);
    d = std::max({d, (k + 1) / n - f, f - k / n});
  }
  return d;
}

EmpiricalRates empirical_rates(const TraceStats& stats) {
  EmpiricalRates out;
  for (const auto& [pair, n] : stats.transition_counts) {
    auto it = stats.occupancy.find(pair.first);
    if (it == stats.occupancy.end() || it->second <= 0.0) {
      out.omitted.push_back(pair);
      continue;
    }
    out.rates[pair] = static_cast<double>(n) / it->second;
  }
  return out;
}

ReversibilityReport reversibility_check(const TraceStats& stats) {
  ReversibilityReport out;
  auto count = [&](const SystemState& a, const SystemState& b) -> std::uint64_t {
    auto it = stats.transition_counts.find({a, b});
    return it == stats.transition_counts.end() ? 0 : it->second;
  };
  for (const auto& [pair, n] : stats.transition_counts) {
    const auto& [a, b] = pair;
    if (a.popcount() > b.popcount()) {
      if (stats.transition_counts.count({b, a})) continue;  // visited from the other side
      PairImbalance p{b, a, 0, n, 0.0};
      p.imbalance = static_cast<double>(n);
      out.pairs.push_back(p);
    } else {
      PairImbalance p{a, b, n, count(b, a), 0.0};
      const double diff = std::abs(static_cast<double>(p.up) - static_cast<double>(p.down));
      p.imbalance = diff / std::max<double>(static_cast<double>(p.up), 1.0);
      out.pairs.push_back(p);
    }
  }
  for (const auto& p : out.pairs) out.max_pair_imbalance = std::max(out.max_pair_imbalance, p.imbalance);
  return out;
}

ResidualReport residual_invariance_check(const TraceStats& stats, const DurationDistribution& countdown,
                                         const DurationDistribution& transmission, std::size_t min_samples) {
  ResidualReport out;
  std::vector<double> cd, tx, unf;
  out.sufficient = !stats.residuals.empty();
  for (const auto& r : stats.residuals) {
    if (r.countdown.size() + r.transmission.size() < min_samples) out.sufficient = false;
    cd.insert(cd.end(), r.countdown.begin(), r.countdown.end());
    tx.insert(tx.end(), r.transmission.begin(), r.transmission.end());
    unf.insert(unf.end(), r.countdown_at_unfreeze.begin(), r.countdown_at_unfreeze.end());
  }
  out.countdown_samples = cd.size();
  out.transmission_samples = tx.size();
  out.unfreeze_samples = unf.size();
  auto cd_cdf = [&](double t) { return countdown.equilibrium_cdf(t); };
  out.ks_countdown = ks_statistic(std::move(cd), cd_cdf);
  out.ks_transmission = ks_statistic(std::move(tx), [&](double t) { return transmission.equilibrium_cdf(t); });
  out.ks_countdown_unfreeze = ks_statistic(std::move(unf), cd_cdf);
  return out;
}

}  // namespace csma
