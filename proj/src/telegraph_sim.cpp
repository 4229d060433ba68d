#include "csma/telegraph_sim.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <random>
#include <string>
#include <cmath>
#include <unordered_map>

#include "csma/error.hpp"

namespace csma {

Ticks to_ticks(double duration) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw Error(ErrorCode::invalid_parameter, "durations must be finite and non-negative");
  }
  return std::max<Ticks>(1, std::llround(duration * kTicksPerUnit));
}

LinkMode mode_of(const RuntimeSnapshot& snap, const ContentionGraph& g, std::size_t link) {
  if (snap.links[link].transmitting) return LinkMode::transmission;
  for (std::size_t j : g.neighbors(link)) {
    if (snap.links[j].transmitting) return LinkMode::frozen_countdown;
  }
  return LinkMode::active_countdown;
}

DrawLog reversed(const DrawLog& draws) {
  DrawLog out = draws;
  for (auto& seq : out) std::reverse(seq.begin(), seq.end());
  return out;
}

TraceStats& TraceStats::merge(const TraceStats& other) {
  total_time += other.total_time;
  for (const auto& [s, t] : other.occupancy) occupancy[s] += t;
  for (const auto& [k, n] : other.transition_counts) transition_counts[k] += n;
  if (residuals.size() < other.residuals.size()) residuals.resize(other.residuals.size());
  for (std::size_t i = 0; i < other.residuals.size(); ++i) {
    auto append = [](std::vector<double>& a, const std::vector<double>& b) { a.insert(a.end(), b.begin(), b.end()); };
    append(residuals[i].countdown, other.residuals[i].countdown);
    append(residuals[i].transmission, other.residuals[i].transmission);
    append(residuals[i].countdown_at_unfreeze, other.residuals[i].countdown_at_unfreeze);
  }
  event_count += other.event_count;
  tie_count += other.tie_count;
  return *this;
}

double TraceStats::occupancy_fraction(const SystemState& s) const {
  if (total_time <= 0.0) return 0.0;
  auto it = occupancy.find(s);
  return it == occupancy.end() ? 0.0 : it->second / total_time;
}

Eigen::VectorXd TraceStats::link_throughputs(std::size_t links) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(links));
  if (total_time <= 0.0) return x;
  for (const auto& [s, t] : occupancy) {
    for (std::size_t i = 0; i < links; ++i) {
      if (s.test(i)) x[static_cast<Eigen::Index>(i)] += t;
    }
  }
  return x / total_time;
}

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const noexcept {
    return std::hash<std::uint64_t>()(p.first * 0x9e3779b97f4a7c15ULL ^ p.second);
  }
};

struct LinkClock {
  bool transmitting = false;
  bool frozen = false;
  Ticks deadline = 0;  // next event of this link (unused while frozen)
  Ticks saved = 0;     // remaining countdown while frozen
};

class RandomDraws {
 public:
  RandomDraws(std::size_t links, std::uint64_t seed, const DurationDistribution& cd,
              const DurationDistribution& tx, bool record)
      : cd_(cd), tx_(tx), record_(record), log_(record ? links : 0) {
    rngs_.reserve(links);
    for (std::size_t i = 0; i < links; ++i) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(i), 0x9e3779b9u};
      rngs_.emplace_back(seq);
    }
  }

  Ticks next(std::size_t link, bool countdown) {
    const Ticks d = to_ticks((countdown ? cd_ : tx_).sample(rngs_[link]));
    if (record_) log_[link].push_back(d);
    return d;
  }

  DrawLog take_log() { return std::move(log_); }

 private:
  const DurationDistribution& cd_;
  const DurationDistribution& tx_;
  bool record_;
  std::vector<std::mt19937_64> rngs_;
  DrawLog log_;
};

class ReplayDraws {
 public:
  explicit ReplayDraws(const DrawLog& draws) : draws_(draws), cursor_(draws.size(), 0) {}

  Ticks next(std::size_t link, bool /*countdown*/) {
    if (cursor_[link] >= draws_[link].size()) {
      throw Error(ErrorCode::exhausted_draws, "draw sequence of link " + std::to_string(link) + " exhausted");
    }
    return draws_[link][cursor_[link]++];
  }

 private:
  const DrawLog& draws_;
  std::vector<std::size_t> cursor_;
};

// Event logic shared by both time directions. dir = +1 runs forward
// (t_next = t + d), dir = -1 runs in reverse time (t_next = t - d); ties go
// to the lowest index forward and the highest index in reverse.
template <class Draws>
class Engine {
 public:
  Engine(const ContentionGraph& g, int dir, Draws& draws, TiePolicy ties)
      : g_(g), dir_(dir), draws_(draws), ties_(ties), links_(g.size()) {}

  std::vector<LinkClock>& links() { return links_; }
  std::uint64_t bits() const { return bits_; }
  void set_bits(std::uint64_t b) { bits_ = b; }
  std::uint64_t ties() const { return tie_count_; }
  const std::vector<std::size_t>& unfrozen() const { return unfrozen_; }

  /// Link owning the next event, or none if every link is frozen.
  std::optional<std::size_t> next_event() {
    std::optional<std::size_t> best;
    Ticks best_key = 0;
    bool tie = false;
    const std::size_t n = links_.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = dir_ > 0 ? k : n - 1 - k;
      if (links_[i].frozen) continue;
      const Ticks key = dir_ * links_[i].deadline;
      if (!best || key < best_key) {
        best = i;
        best_key = key;
        tie = false;
      } else if (key == best_key) {
        tie = true;
      }
    }
    if (tie) {
      if (ties_ == TiePolicy::fail) {
        throw Error(ErrorCode::simultaneous_event, "two links have events at the same instant");
      }
      ++tie_count_;
    }
    return best;
  }

  void fire(std::size_t i) {
    LinkClock& link = links_[i];
    const Ticks t = link.deadline;
    const std::uint64_t bit = std::uint64_t{1} << i;
    unfrozen_.clear();
    if (link.transmitting) {
      // Transmission ends: fresh countdown, resume neighbours now clear.
      link.transmitting = false;
      bits_ &= ~bit;
      link.frozen = false;
      link.deadline = t + dir_ * draws_.next(i, true);
      for (std::uint64_t rest = g_.neighbor_mask(i); rest != 0; rest &= rest - 1) {
        const auto j = static_cast<std::size_t>(std::countr_zero(rest));
        LinkClock& nb = links_[j];
        if (!nb.transmitting && nb.frozen && (bits_ & g_.neighbor_mask(j)) == 0) {
          nb.frozen = false;
          nb.deadline = t + dir_ * nb.saved;
          unfrozen_.push_back(j);
        }
      }
    } else {
      // Countdown reaches zero: transmit, freeze actively counting neighbours.
      link.transmitting = true;
      bits_ |= bit;
      link.deadline = t + dir_ * draws_.next(i, false);
      for (std::uint64_t rest = g_.neighbor_mask(i); rest != 0; rest &= rest - 1) {
        const auto j = static_cast<std::size_t>(std::countr_zero(rest));
        LinkClock& nb = links_[j];
        if (!nb.transmitting && !nb.frozen) {
          nb.frozen = true;
          nb.saved = dir_ * (nb.deadline - t);
        }
      }
    }
  }

 private:
  const ContentionGraph& g_;
  int dir_;
  Draws& draws_;
  TiePolicy ties_;
  std::vector<LinkClock> links_;
  std::uint64_t bits_ = 0;
  std::uint64_t tie_count_ = 0;
  std::vector<std::size_t> unfrozen_;
};

class StatsAccumulator {
 public:
  explicit StatsAccumulator(std::size_t links) : links_(links) {}

  void dwell(std::uint64_t bits, Ticks duration) {
    if (duration > 0) occupancy_[bits] += duration;
  }
  void transition(std::uint64_t from, std::uint64_t to) { ++counts_[{from, to}]; }

  void finish(TraceStats& out, Ticks total) const {
    out.total_time = to_time(total);
    for (const auto& [b, t] : occupancy_) out.occupancy[SystemState(b, links_)] = to_time(t);
    for (const auto& [k, n] : counts_) {
      out.transition_counts[{SystemState(k.first, links_), SystemState(k.second, links_)}] = n;
    }
  }

 private:
  std::size_t links_;
  std::unordered_map<std::uint64_t, Ticks> occupancy_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t, PairHash> counts_;
};

}  // namespace

SimulationRun simulate_forward(const ContentionGraph& g, const DurationDistribution& countdown,
                               const DurationDistribution& transmission, const SimConfig& config) {
  if (!(countdown.mean() > 0.0) || !(transmission.mean() > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "duration means must be positive");
  }
  const auto& stop = config.stop;
  if (!stop.max_events && !stop.max_time) {
    throw Error(ErrorCode::invalid_parameter, "a stop condition (events or time) is required");
  }
  if (stop.max_time && !(*stop.max_time > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "time horizon must be positive");
  }
  const std::size_t L = g.size();
  const bool timed = stop.max_time.has_value();
  const Ticks horizon = timed ? to_ticks(*stop.max_time) : 0;

  std::uint64_t warmup_events = 10 * L;
  Ticks warmup_time = 0;
  if (config.warmup_events) {
    warmup_events = *config.warmup_events;
  } else if (stop.max_events) {
    warmup_events = std::max<std::uint64_t>(warmup_events, *stop.max_events / 100);
  } else {
    warmup_time = horizon / 100;
  }

  RandomDraws draws(L, config.seed, countdown, transmission, config.record_draws);
  Engine<RandomDraws> engine(g, +1, draws, config.ties);
  for (std::size_t i = 0; i < L; ++i) engine.links()[i].deadline = draws.next(i, true);

  SimulationRun run;
  StatsAccumulator acc(L);
  if (config.record_trace) run.trace = StateTrace{SystemState(0, L), {}};
  if (config.record_residuals) run.stats.residuals.resize(L);

  Ticks now = 0;
  bool active = warmup_events == 0 && warmup_time == 0;
  Ticks stats_start = 0;
  std::uint64_t events = 0;

  while (true) {
    const auto next = engine.next_event();
    if (!next) break;
    const Ticks t = engine.links()[*next].deadline;
    if (timed && t > horizon) break;
    if (stop.max_events && events >= *stop.max_events && t != now) break;

    const std::uint64_t before = engine.bits();
    if (active) acc.dwell(before, t - now);
    now = t;
    engine.fire(*next);
    ++events;
    const std::uint64_t after = engine.bits();

    if (run.trace) run.trace->changes.emplace_back(t, SystemState(after, L));
    if (active) {
      acc.transition(before, after);
      if (config.record_residuals) {
        const auto& links = engine.links();
        for (std::size_t k = 0; k < L; ++k) {
          if (k == *next) continue;
          if (links[k].transmitting) {
            run.stats.residuals[k].transmission.push_back(to_time(links[k].deadline - t));
          } else if (!links[k].frozen) {
            run.stats.residuals[k].countdown.push_back(to_time(links[k].deadline - t));
          }
        }
        for (std::size_t k : engine.unfrozen()) {
          run.stats.residuals[k].countdown_at_unfreeze.push_back(to_time(links[k].deadline - t));
        }
      }
    } else if (events >= warmup_events && now >= warmup_time) {
      active = true;
      stats_start = now;
    }
  }
  if (timed) {
    if (active) acc.dwell(engine.bits(), horizon - now);
    now = horizon;
  }

  acc.finish(run.stats, active ? now - stats_start : 0);
  run.stats.event_count = events;
  run.stats.tie_count = engine.ties();

  run.end.time = now;
  run.end.links.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    const LinkClock& c = engine.links()[i];
    LinkRuntime& r = run.end.links[i];
    r.transmitting = c.transmitting;
    if (c.transmitting) {
      r.rt = c.deadline - now;
    } else {
      r.rc = c.frozen ? c.saved : c.deadline - now;
    }
  }
  run.draws = draws.take_log();
  return run;
}

SimulationRun simulate_reverse(const ContentionGraph& g, const RuntimeSnapshot& end,
                               const DrawLog& reversed_draws, bool record_trace) {
  const std::size_t L = g.size();
  if (end.links.size() != L || reversed_draws.size() != L) {
    throw Error(ErrorCode::inconsistent_snapshot, "snapshot and draw sequences need one entry per link");
  }
  if (end.time <= 0) throw Error(ErrorCode::inconsistent_snapshot, "snapshot time must be positive");

  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < L; ++i) {
    const LinkRuntime& r = end.links[i];
    if (r.rc < 0 || r.rt < 0 || (r.rc != 0) == (r.rt != 0) || r.transmitting != (r.rt != 0)) {
      throw Error(ErrorCode::inconsistent_snapshot,
                  "link " + std::to_string(i) + " must have exactly one of rc, rt nonzero");
    }
    if (r.transmitting) bits |= std::uint64_t{1} << i;
  }
  if (!g.feasible(bits)) throw Error(ErrorCode::inconsistent_snapshot, "neighbouring links both transmitting");

  ReplayDraws draws(reversed_draws);
  Engine<ReplayDraws> engine(g, -1, draws, TiePolicy::break_by_index);
  engine.set_bits(bits);
  for (std::size_t i = 0; i < L; ++i) {
    const LinkRuntime& r = end.links[i];
    // The in-progress draw minus what remains forward is what has elapsed,
    // i.e. what remains when running backwards.
    const Ticks elapsed = draws.next(i, !r.transmitting) - (r.transmitting ? r.rt : r.rc);
    if (elapsed < 0) {
      throw Error(ErrorCode::inconsistent_snapshot, "remaining time exceeds the in-progress draw");
    }
    LinkClock& c = engine.links()[i];
    c.transmitting = r.transmitting;
    c.frozen = !r.transmitting && (bits & g.neighbor_mask(i)) != 0;
    if (c.frozen) {
      c.saved = elapsed;
    } else {
      c.deadline = end.time - elapsed;
    }
  }

  SimulationRun run;
  StatsAccumulator acc(L);
  std::vector<std::pair<Ticks, SystemState>> changes;
  Ticks now = end.time;
  std::uint64_t events = 0;
  while (true) {
    const auto next = engine.next_event();
    if (!next) break;
    const Ticks t = engine.links()[*next].deadline;
    if (t <= 0) break;
    const std::uint64_t after = engine.bits();  // forward state just after t
    acc.dwell(after, now - t);
    now = t;
    engine.fire(*next);
    ++events;
    const std::uint64_t before = engine.bits();
    acc.transition(before, after);
    if (record_trace) changes.emplace_back(t, SystemState(after, L));
  }
  acc.dwell(engine.bits(), now);

  acc.finish(run.stats, end.time);
  run.stats.event_count = events;
  run.stats.tie_count = engine.ties();
  if (record_trace) {
    std::reverse(changes.begin(), changes.end());
    run.trace = StateTrace{SystemState(engine.bits(), L), std::move(changes)};
  }
  run.end.time = 0;
  run.end.links.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    const LinkClock& c = engine.links()[i];
    LinkRuntime& r = run.end.links[i];
    r.transmitting = c.transmitting;
    const Ticks remaining = c.frozen ? c.saved : c.deadline;  // time left going backwards
    (c.transmitting ? r.rt : r.rc) = remaining;
  }
  return run;
}

}  // namespace csma
