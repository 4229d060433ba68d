#include "csma/staged_chain.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "csma/error.hpp"

namespace csma {

StagedChainSpec StagedChainSpec::gamma(int y, int z, double d, double e) {
  StagedChainSpec spec{{{y, 1.0}}, {{z, 1.0}}, d, e};
  spec.validate();
  return spec;
}

namespace {

double law_mean(const StageLaw& law) {
  double m = 0.0;
  for (auto [k, p] : law) m += k * p;
  return m;
}

void validate_law(const StageLaw& law, const char* what) {
  if (law.empty()) throw Error(ErrorCode::invalid_parameter, std::string(what) + " stage law is empty");
  double total = 0.0;
  for (auto [k, p] : law) {
    if (k < 1) throw Error(ErrorCode::invalid_parameter, std::string(what) + " stage counts must be >= 1");
    if (!(p > 0.0)) throw Error(ErrorCode::invalid_parameter, std::string(what) + " stage probabilities must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::invalid_parameter, std::string(what) + " stage probabilities must sum to 1");
  }
}

}  // namespace

double StagedChainSpec::mean_countdown_stages() const { return law_mean(countdown_stages); }
double StagedChainSpec::mean_transmit_stages() const { return law_mean(transmit_stages); }

void StagedChainSpec::validate() const {
  validate_law(countdown_stages, "countdown");
  validate_law(transmit_stages, "transmission");
  if (!(countdown_stage_mean > 0.0) || !(transmit_stage_mean > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "stage means must be positive");
  }
}

std::string format_staged_state(const StagedState& x, bool show_stage_counts) {
  std::ostringstream out;
  for (const auto& l : x) out << (l.transmitting ? '1' : '0');
  out << '|';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (show_stage_counts) {
      if (i > 0) out << ',';
      out << x[i].stages << ':' << x[i].remaining;
    } else {
      out << x[i].remaining;
    }
  }
  return out.str();
}

SystemState transmission_state(const StagedState& x) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].transmitting) bits |= std::uint64_t{1} << i;
  }
  return SystemState(bits, x.size());
}

namespace {

std::vector<StagedLinkState> local_states(const StageLaw& law, bool transmitting) {
  std::vector<StagedLinkState> out;
  for (auto [k, p] : law) {
    for (int r = 1; r <= k; ++r) out.push_back({transmitting, k, r});
  }
  return out;
}

// Index of a local state within its list; lists are small.
int local_index(const std::vector<StagedLinkState>& list, const StagedLinkState& s) {
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (list[k] == s) return static_cast<int>(k);
  }
  return -1;
}

}  // namespace

StagedSolution staged_stationary(const ContentionGraph& g, const StagedChainSpec& spec,
                                 const EnumerationLimits& limits) {
  spec.validate();
  const std::size_t L = g.size();
  const auto countdown_local = local_states(spec.countdown_stages, false);
  const auto transmit_local = local_states(spec.transmit_stages, true);
  const auto feasible = feasible_states(g, limits);

  // Count first so the cap is enforced before allocating.
  double total = 0.0;
  for (const auto& s : feasible) {
    const int n = s.popcount();
    total += std::pow(double(transmit_local.size()), n) *
             std::pow(double(countdown_local.size()), static_cast<double>(L) - n);
  }
  if (total > static_cast<double>(limits.max_candidates)) {
    throw Error(ErrorCode::too_large, "expanded staged chain exceeds the enumeration cap");
  }

  // Enumerate expanded states as mixed-radix counters per feasible s.
  std::vector<StagedState> states;
  std::map<std::vector<int>, std::size_t> index;
  auto key_of = [&](const StagedState& x) {
    std::vector<int> key(L * 2);
    for (std::size_t i = 0; i < L; ++i) {
      key[2 * i] = x[i].transmitting;
      key[2 * i + 1] = local_index(x[i].transmitting ? transmit_local : countdown_local, x[i]);
    }
    return key;
  };
  for (const auto& s : feasible) {
    std::vector<std::size_t> digit(L, 0);
    while (true) {
      StagedState x(L);
      for (std::size_t i = 0; i < L; ++i) {
        x[i] = s.test(i) ? transmit_local[digit[i]] : countdown_local[digit[i]];
      }
      index.emplace(key_of(x), states.size());
      states.push_back(std::move(x));
      std::size_t i = 0;
      for (; i < L; ++i) {
        const std::size_t radix = s.test(i) ? transmit_local.size() : countdown_local.size();
        if (++digit[i] < radix) break;
        digit[i] = 0;
      }
      if (i == L) break;
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(states.size());
  const double rate_cd = 1.0 / spec.countdown_stage_mean;
  const double rate_tx = 1.0 / spec.transmit_stage_mean;
  std::vector<Eigen::Triplet<double>> q;  // generator entries (row = from)
  Eigen::VectorXd exit_rate = Eigen::VectorXd::Zero(n);

  for (Eigen::Index from = 0; from < n; ++from) {
    const StagedState& x = states[static_cast<std::size_t>(from)];
    const SystemState s = transmission_state(x);
    auto add = [&](const StagedState& to, double rate) {
      const auto k = static_cast<Eigen::Index>(index.at(key_of(to)));
      q.emplace_back(from, k, rate);
      exit_rate[from] += rate;
    };
    for (std::size_t i = 0; i < L; ++i) {
      const StagedLinkState& li = x[i];
      if (li.transmitting) {
        StagedState to = x;
        if (li.remaining > 1) {
          to[i].remaining -= 1;
          add(to, rate_tx);
        } else {
          for (auto [y, p] : spec.countdown_stages) {
            to[i] = {false, y, y};
            add(to, p * rate_tx);
          }
        }
      } else if ((s.bits() & g.neighbor_mask(i)) == 0) {
        StagedState to = x;
        if (li.remaining > 1) {
          to[i].remaining -= 1;
          add(to, rate_cd);
        } else {
          for (auto [z, p] : spec.transmit_stages) {
            to[i] = {true, z, z};
            add(to, p * rate_cd);
          }
        }
      }
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) q.emplace_back(k, k, -exit_rate[k]);

  Eigen::SparseMatrix<double> Q(n, n);
  Q.setFromTriplets(q.begin(), q.end());

  // Solve Q^T pi = 0 with the last equation replaced by sum(pi) = 1.
  std::vector<Eigen::Triplet<double>> a;
  a.reserve(q.size() + static_cast<std::size_t>(n));
  for (const auto& t : q) {
    if (t.col() != n - 1) a.emplace_back(t.col(), t.row(), t.value());
  }
  for (Eigen::Index k = 0; k < n; ++k) a.emplace_back(n - 1, k, 1.0);
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(a.begin(), a.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;

  StagedSolution out;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  Eigen::VectorXd pi;
  if (lu.info() == Eigen::Success) pi = lu.solve(rhs);
  const Eigen::SparseMatrix<double> Qt = Q.transpose();
  auto residual_of = [&](const Eigen::VectorXd& v) { return (Qt * v).cwiseAbs().maxCoeff(); };

  if (lu.info() != Eigen::Success || !pi.allFinite() || residual_of(pi) > 1e-10) {
    // Uniformized power iteration: pi <- pi (I + Q / lambda).
    const double lambda = exit_rate.maxCoeff() * 1.05;
    pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < 2'000'000; ++it) {
      Eigen::VectorXd next = pi + (Qt * pi) / lambda;
      next /= next.sum();
      const double change = (next - pi).cwiseAbs().maxCoeff();
      pi = std::move(next);
      if (change < 1e-16) break;
    }
    out.used_power_iteration = true;
  }
  out.residual = residual_of(pi);
  if (!pi.allFinite() || out.residual > 1e-8) {
    throw Error(ErrorCode::solver_failure,
                "stationary solve did not converge (residual " + std::to_string(out.residual) + ")");
  }

  // Marginal over the transmission state.
  std::map<SystemState, double> marginal;
  for (Eigen::Index k = 0; k < n; ++k) {
    marginal[transmission_state(states[static_cast<std::size_t>(k)])] += pi[k];
  }
  std::vector<SystemState> ms;
  Eigen::VectorXd mw(static_cast<Eigen::Index>(marginal.size()));
  for (const auto& [s, p] : marginal) {
    mw[static_cast<Eigen::Index>(ms.size())] = std::max(p, 0.0);
    ms.push_back(s);
  }
  out.marginal = StateDistribution::from_weights(std::move(ms), mw);
  out.states = std::move(states);
  out.probabilities = std::move(pi);
  return out;
}

}  // namespace csma
