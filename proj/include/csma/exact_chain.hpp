#pragma once

// Exact stationary distribution of the ideal CSMA network.
//
// With per-link countdown overhead c_i = E[T_cd,i] / E[T_tr,i] the stationary
// distribution over feasible states is the product form
//
//   P_s  proportional to  prod_{i : s_i = 1} 1 / c_i
//
// which for uniform c is P_s = B / c^n, n = popcount(s). Detailed balance
// convention: for a left state s and right state s' differing in link i,
// P_{s'} = P_s / c_i (rate 1/E[T_cd] left->right, 1/E[T_tr] right->left).

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "csma/boe.hpp"
#include "csma/contention_graph.hpp"

namespace csma {

/// Per-link countdown overhead c_i > 0.
class AccessParams {
 public:
  explicit AccessParams(Eigen::VectorXd c);
  static AccessParams uniform(std::size_t links, double c);

  const Eigen::VectorXd& c() const noexcept { return c_; }
  double operator[](std::size_t link) const { return c_[static_cast<Eigen::Index>(link)]; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(c_.size()); }
  bool is_uniform() const noexcept;

 private:
  Eigen::VectorXd c_;
};

class StateDistribution {
 public:
  /// Normalizes non-negative weights over the given states. The states must
  /// be distinct; they are re-sorted into canonical order.
  static StateDistribution from_weights(std::vector<SystemState> states, const Eigen::VectorXd& weights);

  const std::vector<SystemState>& states() const noexcept { return states_; }
  const Eigen::VectorXd& probabilities() const noexcept { return probabilities_; }
  /// Probability of the all-idle state (the normalizer B).
  double normalizer() const noexcept { return normalizer_; }

  /// Zero for states outside the support.
  double probability(const SystemState& s) const;
  std::optional<std::size_t> index_of(const SystemState& s) const;

 private:
  std::vector<SystemState> states_;
  Eigen::VectorXd probabilities_;
  double normalizer_ = 0.0;
};

/// Unnormalized product-form weights scaled so the largest weight is 1.
/// Computed in the log domain so tiny c does not overflow.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> product_form_weights(const std::vector<SystemState>& states,
                                                              const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c) {
  using std::exp;
  using std::log;
  const Eigen::Index n = static_cast<Eigen::Index>(states.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> log_w(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Scalar acc(0);
    for (std::size_t i = 0; i < states[k].size(); ++i) {
      if (states[k].test(i)) acc -= log(c[static_cast<Eigen::Index>(i)]);
    }
    log_w[k] = acc;
  }
  const Scalar top = log_w.maxCoeff();
  return (log_w.array() - top).exp().matrix();
}

/// x_i = sum of probabilities over states with link i transmitting.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> marginal_throughputs(const std::vector<SystemState>& states,
                                                              const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& p,
                                                              std::size_t links) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(static_cast<Eigen::Index>(links));
  for (std::size_t k = 0; k < states.size(); ++k) {
    for (std::size_t i = 0; i < links; ++i) {
      if (states[k].test(i)) x[static_cast<Eigen::Index>(i)] += p[static_cast<Eigen::Index>(k)];
    }
  }
  return x;
}

StateDistribution stationary_distribution(const ContentionGraph& g, const AccessParams& params,
                                          const EnumerationLimits& limits = {});

/// Throws support_mismatch unless dist is defined over feasible_states(g).
ThroughputVector link_throughputs(const StateDistribution& dist, const ContentionGraph& g);

/// Exact c -> 0 limit: uniform mass over the maximum independent sets,
/// computed from the feasible-state lattice rather than from maximal-set
/// enumeration.
ThroughputVector boe_limit(const ContentionGraph& g, const EnumerationLimits& limits = {});

struct MrfReport {
  bool holds = true;
  double max_violation = 0.0;
};

/// Checks P(s_i | s_{G-i}) = P(s_i | s_{N_i}) for every link: conditional
/// probabilities of s_i = 1 must agree across all conditioning assignments
/// that share the neighbour values. Zero-probability conditioning events are
/// skipped.
MrfReport mrf_check(const StateDistribution& dist, const ContentionGraph& g, double tolerance);

}  // namespace csma
