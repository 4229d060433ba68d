#include "csma/exact_chain.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "csma/error.hpp"

namespace csma {

AccessParams::AccessParams(Eigen::VectorXd c) : c_(std::move(c)) {
  if (c_.size() == 0) throw Error(ErrorCode::invalid_parameter, "c must have one entry per link");
  for (Eigen::Index i = 0; i < c_.size(); ++i) {
    if (!(c_[i] > 0.0) || !std::isfinite(c_[i])) {
      throw Error(ErrorCode::invalid_parameter, "countdown overhead c must be positive and finite");
    }
  }
}

AccessParams AccessParams::uniform(std::size_t links, double c) {
  return AccessParams(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(links), c));
}

bool AccessParams::is_uniform() const noexcept { return (c_.array() == c_[0]).all(); }

StateDistribution StateDistribution::from_weights(std::vector<SystemState> states,
                                                  const Eigen::VectorXd& weights) {
  if (static_cast<Eigen::Index>(states.size()) != weights.size() || states.empty()) {
    throw Error(ErrorCode::invalid_parameter, "one weight per state is required");
  }
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw Error(ErrorCode::invalid_parameter, "weights must be finite and non-negative");
  }
  const double total = weights.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::invalid_parameter, "weights sum to zero");

  std::vector<std::size_t> order(states.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return states[a] < states[b]; });

  StateDistribution out;
  out.states_.reserve(states.size());
  out.probabilities_.resize(weights.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.states_.push_back(states[order[k]]);
    out.probabilities_[static_cast<Eigen::Index>(k)] = weights[static_cast<Eigen::Index>(order[k])] / total;
    if (k > 0 && out.states_[k] == out.states_[k - 1]) {
      throw Error(ErrorCode::invalid_parameter, "duplicate state in distribution");
    }
  }
  const SystemState idle(0, out.states_.front().size());
  out.normalizer_ = out.probability(idle);
  return out;
}

std::optional<std::size_t> StateDistribution::index_of(const SystemState& s) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), s);
  if (it == states_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

double StateDistribution::probability(const SystemState& s) const {
  auto k = index_of(s);
  return k ? probabilities_[static_cast<Eigen::Index>(*k)] : 0.0;
}

StateDistribution stationary_distribution(const ContentionGraph& g, const AccessParams& params,
                                          const EnumerationLimits& limits) {
  if (params.size() != g.size()) {
    throw Error(ErrorCode::invalid_parameter, "c must have one entry per link");
  }
  auto states = feasible_states(g, limits);
  const Eigen::VectorXd w = product_form_weights<double>(states, params.c());
  return StateDistribution::from_weights(std::move(states), w);
}

ThroughputVector link_throughputs(const StateDistribution& dist, const ContentionGraph& g) {
  if (dist.states() != feasible_states(g)) {
    throw Error(ErrorCode::support_mismatch, "distribution support differs from the feasible states");
  }
  return marginal_throughputs<double>(dist.states(), dist.probabilities(), g.size());
}

ThroughputVector boe_limit(const ContentionGraph& g, const EnumerationLimits& limits) {
  const auto states = feasible_states(g, limits);
  int top = 0;
  for (const auto& s : states) top = std::max(top, s.popcount());
  Eigen::VectorXd p(static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k) {
    p[static_cast<Eigen::Index>(k)] = states[k].popcount() == top ? 1.0 : 0.0;
  }
  p /= p.sum();
  return marginal_throughputs<double>(states, p, g.size());
}

MrfReport mrf_check(const StateDistribution& dist, const ContentionGraph& g, double tolerance) {
  if ((dist.probabilities().array() <= 0.0).any()) {
    throw Error(ErrorCode::invalid_parameter, "mrf_check requires a strictly positive distribution");
  }
  MrfReport report;
  for (std::size_t i = 0; i < g.size(); ++i) {
    // Conditional P(s_i = 1 | rest), grouped by the neighbour assignment.
    std::map<std::uint64_t, std::pair<double, double>> range;  // neighbour bits -> (min, max)
    for (std::size_t k = 0; k < dist.states().size(); ++k) {
      const SystemState& rest = dist.states()[k];
      if (rest.test(i)) continue;
      const double p0 = dist.probabilities()[static_cast<Eigen::Index>(k)];
      const double p1 = dist.probability(rest.with(i, true));
      if (p0 + p1 <= 0.0) continue;
      const double cond = p1 / (p0 + p1);
      const std::uint64_t key = rest.bits() & g.neighbor_mask(i);
      auto [it, inserted] = range.try_emplace(key, cond, cond);
      if (!inserted) {
        it->second.first = std::min(it->second.first, cond);
        it->second.second = std::max(it->second.second, cond);
      }
    }
    for (const auto& [key, mm] : range) {
      report.max_violation = std::max(report.max_violation, mm.second - mm.first);
    }
  }
  report.holds = report.max_violation <= tolerance;
  return report;
}

}  // namespace csma
