#include "csma/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csma/error.hpp"

namespace csma {

namespace {

template <class F>
MethodColumn column(F&& f) {
  MethodColumn col;
  try {
    col.throughput = f();
  } catch (const std::exception& e) {
    col.error = e.what();
  }
  return col;
}

}  // namespace

ComparisonReport compare_methods(const ContentionGraph& g, const AccessParams& params, const CompareConfig& config) {
  if (params.size() != g.size()) throw Error(ErrorCode::invalid_parameter, "one c value per link required");
  ComparisonReport r(params);
  r.seed = config.seed;
  r.events = config.events;

  r.boe = column([&] { return boe_throughput(g); });
  r.exact = column([&] { return link_throughputs(stationary_distribution(g, params), g); });
  r.simulation = column([&]() -> ThroughputVector {
    if (!config.countdown && !params.is_uniform()) {
      throw Error(ErrorCode::invalid_parameter, "simulation uses one countdown law; heterogeneous c needs --cd");
    }
    const auto cd = config.countdown.value_or(DurationDistribution::exponential(params[0]));
    const auto tx = config.transmission.value_or(DurationDistribution::exponential(1.0));
    r.countdown = cd.to_string();
    r.transmission = tx.to_string();
    SimConfig sc;
    sc.stop = StopCondition::events(config.events);
    sc.seed = config.seed;
    sc.warmup_events = config.warmup_events;
    const auto run = simulate_forward(g, cd, tx, sc);
    r.sim_tie_count = run.stats.tie_count;
    return run.stats.link_throughputs(g.size());
  });
  r.baseline = column([&]() -> ThroughputVector {
    if (!params.is_uniform()) throw Error(ErrorCode::invalid_parameter, "baseline supports uniform c only");
    const auto sol = solve_fixed_point(IEProblem{g, params[0]});
    r.baseline_converged = sol.converged;
    r.baseline_iterations = sol.iterations;
    return sol.x;
  });

  if (r.exact.present()) {
    for (MethodColumn* col : {&r.boe, &r.exact, &r.simulation, &r.baseline}) {
      if (col->present()) col->deviation = (*col->throughput - *r.exact.throughput).cwiseAbs().maxCoeff();
    }
  }
  return r;
}

std::vector<std::string> starvation_report(const ThroughputVector& tv, const ContentionGraph& g, double threshold) {
  if (!(threshold >= 0.0 && threshold < 1.0)) throw Error(ErrorCode::invalid_parameter, "threshold must be in [0, 1)");
  if (static_cast<std::size_t>(tv.size()) != g.size()) {
    throw Error(ErrorCode::invalid_parameter, "throughput vector has the wrong number of links");
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (tv[static_cast<Eigen::Index>(i)] < threshold) out.push_back(g.label(i));
  }
  return out;
}

IslandReport island_report(const ContentionGraph& g, int bar, const EnumerationLimits& limits) {
  IslandReport r;
  r.bar = bar;
  r.mis = maximum_independent_sets(g, limits);
  const auto n = static_cast<Eigen::Index>(r.mis.size());
  r.distance = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) r.distance(a, b) = hamming_distance(r.mis[a], r.mis[b]);
  }
  if (n > 1) {
    for (Eigen::Index a = 0; a < n; ++a) {
      int nearest = std::numeric_limits<int>::max();
      for (Eigen::Index b = 0; b < n; ++b) {
        if (a != b) nearest = std::min(nearest, r.distance(a, b));
      }
      r.max_min_distance = std::max(r.max_min_distance, nearest);
    }
  }
  r.flagged = n > 1 && r.max_min_distance >= bar;
  return r;
}

namespace {

struct Score {
  double inf = 0.0;
  double two = 0.0;
  // The smooth 2-norm drives the search; coordinate moves stall on the
  // kinks of the max-norm.
  bool operator<(const Score& o) const { return two < o.two || (two == o.two && inf < o.inf); }
};

}  // namespace

CalibrationResult calibrate_c(const ContentionGraph& g, const ThroughputVector& target, double c_floor,
                              long max_iter, const EnumerationLimits& limits) {
  if (static_cast<std::size_t>(target.size()) != g.size()) {
    throw Error(ErrorCode::invalid_parameter, "target has the wrong number of links");
  }
  if (!(target.array() > 0.0).all() || !(target.array() < 1.0).all()) {
    throw Error(ErrorCode::invalid_parameter, "target components must lie in (0, 1)");
  }
  if (!(c_floor > 0.0) || !std::isfinite(c_floor)) throw Error(ErrorCode::invalid_parameter, "c floor must be positive");

  const auto states = feasible_states(g, limits);
  const auto L = static_cast<Eigen::Index>(g.size());
  auto throughput = [&](const Eigen::VectorXd& c) {
    Eigen::VectorXd w = product_form_weights<double>(states, c);
    w /= w.sum();
    return marginal_throughputs<double>(states, w, g.size());
  };
  auto score = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd d = x - target;
    return Score{d.cwiseAbs().maxCoeff(), d.norm()};
  };

  // Search in log(c / c_floor) >= 0, keeping the minimum at 0.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(L);
  auto c_of = [&](const Eigen::VectorXd& v) { return (c_floor * (v.array() - v.minCoeff()).exp()).matrix().eval(); };
  Eigen::VectorXd x = throughput(c_of(u));
  Score best = score(x);
  double step = std::log(2.0);
  CalibrationResult r(AccessParams(c_of(u)));

  while (r.iterations < max_iter && best.two > 0.0) {
    ++r.iterations;
    bool improved = false;
    for (Eigen::Index i = 0; i < L; ++i) {
      for (double dir : {1.0, -1.0}) {
        Eigen::VectorXd trial = u;
        trial[i] += dir * step;
        trial.array() -= trial.minCoeff();
        const Eigen::VectorXd tx = throughput(c_of(trial));
        const Score s = score(tx);
        if (s < best) {
          best = s;
          u = trial;
          x = tx;
          improved = true;
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < 1e-12) {
        r.converged = true;
        break;
      }
    }
  }
  if (best.two == 0.0) r.converged = true;
  r.params = AccessParams(c_of(u));
  r.achieved = x;
  r.residual = best.inf;
  return r;
}

IslandSojourns island_sojourns(const StateTrace& trace, const ContentionGraph& g, const EnumerationLimits& limits) {
  IslandSojourns out;
  out.mis = maximum_independent_sets(g, limits);
  out.sojourns.assign(out.mis.size(), 0);
  std::vector<double> total(out.mis.size(), 0.0);

  auto which = [&](const SystemState& s) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < out.mis.size(); ++k) {
      if (out.mis[k] == s) return k;
    }
    return std::nullopt;
  };
  std::optional<std::size_t> current = which(trace.initial);
  Ticks since = 0;
  for (const auto& [t, s] : trace.changes) {
    const auto k = which(s);
    if (!k || k == current) continue;
    if (current) {
      ++out.sojourns[*current];
      total[*current] += to_time(t - since);
    }
    current = k;
    since = t;
  }
  out.mean_duration.resize(out.mis.size(), 0.0);
  for (std::size_t k = 0; k < out.mis.size(); ++k) {
    if (out.sojourns[k] > 0) out.mean_duration[k] = total[k] / static_cast<double>(out.sojourns[k]);
  }
  return out;
}

}  // namespace csma
