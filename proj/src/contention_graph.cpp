#include "csma/contention_graph.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

#include "csma/error.hpp"
#include "json.hpp"

namespace csma {

SystemState::SystemState(std::uint64_t bits, std::size_t size) : bits_(bits), size_(size) {
  if (size > kMaxLinks) {
    throw Error(ErrorCode::too_many_links, "state has more than 64 links");
  }
  if (size < kMaxLinks && (bits >> size) != 0) {
    throw Error(ErrorCode::invalid_parameter, "state bits exceed its size");
  }
}

SystemState SystemState::from_string(std::string_view text) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      bits |= std::uint64_t{1} << i;
    } else if (text[i] != '0') {
      throw Error(ErrorCode::invalid_parameter, "state string must contain only 0/1");
    }
  }
  return SystemState(bits, text.size());
}

SystemState SystemState::with(std::size_t link, bool on) const {
  const std::uint64_t mask = std::uint64_t{1} << link;
  return SystemState(on ? (bits_ | mask) : (bits_ & ~mask), size_);
}

std::string SystemState::to_string() const {
  std::string out(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) out[i] = '1';
  }
  return out;
}

std::strong_ordering SystemState::operator<=>(const SystemState& other) const noexcept {
  if (auto c = size_ <=> other.size_; c != 0) return c;
  if (auto c = popcount() <=> other.popcount(); c != 0) return c;
  const std::uint64_t diff = bits_ ^ other.bits_;
  if (diff == 0) return std::strong_ordering::equal;
  const std::uint64_t lowest = diff & (~diff + 1);
  return (bits_ & lowest) ? std::strong_ordering::less : std::strong_ordering::greater;
}

ContentionGraph::ContentionGraph(std::vector<std::string> labels, const std::vector<Edge>& edges)
    : labels_(std::move(labels)), adjacency_(labels_.size(), 0) {
  if (labels_.empty()) throw Error(ErrorCode::empty_graph, "graph has no links");
  if (labels_.size() > kMaxLinks) {
    throw Error(ErrorCode::too_many_links, "at most 64 links are supported");
  }
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorCode::duplicate_label, "duplicate link '" + l + "'");
  }
  for (auto [a, b] : edges) {
    if (a >= size() || b >= size()) throw Error(ErrorCode::unknown_label, "edge endpoint out of range");
    if (a == b) throw Error(ErrorCode::self_edge, "link '" + labels_[a] + "' joined to itself");
    adjacency_[a] |= std::uint64_t{1} << b;
    adjacency_[b] |= std::uint64_t{1} << a;
  }
}

std::optional<std::size_t> ContentionGraph::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<std::size_t> ContentionGraph::neighbors(std::size_t link) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < size(); ++j) {
    if (adjacent(link, j)) out.push_back(j);
  }
  return out;
}

std::size_t ContentionGraph::max_degree() const noexcept {
  std::size_t best = 0;
  for (std::size_t i = 0; i < size(); ++i) best = std::max(best, degree(i));
  return best;
}

std::uint64_t ContentionGraph::full_mask() const noexcept {
  return size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << size()) - 1;
}

std::vector<ContentionGraph::Edge> ContentionGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) {
      if (adjacent(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

bool ContentionGraph::feasible(std::uint64_t bits) const noexcept {
  for (std::uint64_t rest = bits; rest != 0; rest &= rest - 1) {
    const int i = std::countr_zero(rest);
    if (adjacency_[i] & bits) return false;
  }
  return true;
}

bool ContentionGraph::feasible(const SystemState& s) const noexcept {
  return s.size() == size() && feasible(s.bits());
}

namespace {

std::string label_from_json(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorCode::malformed_document, "labels must be strings");
}

}  // namespace

GraphDocument parse_graph_document(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_document, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::malformed_document, "document must be an object");
  if (!doc.contains("links") || !doc["links"].is_array()) {
    throw Error(ErrorCode::malformed_document, "\"links\" must be an array");
  }
  std::vector<std::string> labels;
  for (const auto& v : doc["links"]) labels.push_back(label_from_json(v));
  if (labels.empty()) throw Error(ErrorCode::empty_graph, "graph has no links");
  {
    std::unordered_set<std::string> seen;
    for (const auto& l : labels) {
      if (!seen.insert(l).second) throw Error(ErrorCode::duplicate_label, "duplicate link '" + l + "'");
    }
  }
  auto index = [&](const nlohmann::json& v) {
    const std::string l = label_from_json(v);
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) throw Error(ErrorCode::unknown_label, "edge references unknown link '" + l + "'");
    return static_cast<std::size_t>(it - labels.begin());
  };

  std::vector<ContentionGraph::Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw Error(ErrorCode::malformed_document, "\"edges\" must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2) {
        throw Error(ErrorCode::malformed_document, "each edge must be a 2-array of labels");
      }
      edges.emplace_back(index(e[0]), index(e[1]));
    }
  }
  GraphDocument out{ContentionGraph(labels, edges), std::nullopt, false};

  if (doc.contains("c")) {
    const auto& c = doc["c"];
    std::vector<double> values(labels.size(), 0.0);
    if (c.is_number()) {
      std::fill(values.begin(), values.end(), c.get<double>());
      out.c_uniform = true;
    } else if (c.is_object()) {
      std::vector<bool> set(labels.size(), false);
      for (auto it = c.begin(); it != c.end(); ++it) {
        if (!it.value().is_number()) throw Error(ErrorCode::malformed_document, "\"c\" values must be numbers");
        const std::size_t i = index(it.key());
        values[i] = it.value().get<double>();
        set[i] = true;
      }
      if (std::find(set.begin(), set.end(), false) != set.end()) {
        throw Error(ErrorCode::malformed_document, "per-link \"c\" must cover every link");
      }
      out.c_uniform = std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end();
    } else {
      throw Error(ErrorCode::malformed_document, "\"c\" must be a number or a label->number object");
    }
    out.c = std::move(values);
  }
  return out;
}

ContentionGraph parse_graph(std::string_view text) { return parse_graph_document(text).graph; }

namespace {

class CandidateCounter {
 public:
  explicit CandidateCounter(const EnumerationLimits& limits) : cap_(limits.max_candidates) {}
  void tick() {
    if (++count_ > cap_) {
      throw Error(ErrorCode::too_large,
                  "state-space enumeration exceeded " + std::to_string(cap_) + " candidates");
    }
  }

 private:
  std::uint64_t cap_;
  std::uint64_t count_ = 0;
};

void extend_independent(const ContentionGraph& g, std::size_t link, std::uint64_t chosen,
                        std::uint64_t blocked, CandidateCounter& counter,
                        std::vector<SystemState>& out) {
  counter.tick();
  if (link == g.size()) {
    out.emplace_back(chosen, g.size());
    return;
  }
  extend_independent(g, link + 1, chosen, blocked, counter, out);
  if (!((blocked >> link) & 1u)) {
    extend_independent(g, link + 1, chosen | (std::uint64_t{1} << link),
                       blocked | g.neighbor_mask(link), counter, out);
  }
}

// Maximal cliques of the complement graph are the maximal independent sets.
void bron_kerbosch(const std::vector<std::uint64_t>& comp, std::size_t n, std::uint64_t r,
                   std::uint64_t p, std::uint64_t x, CandidateCounter& counter,
                   std::vector<SystemState>& out) {
  counter.tick();
  if (p == 0 && x == 0) {
    out.emplace_back(r, n);
    return;
  }
  std::uint64_t pivot_nbrs = 0;
  int best = -1;
  for (std::uint64_t rest = p | x; rest != 0; rest &= rest - 1) {
    const int u = std::countr_zero(rest);
    const int score = std::popcount(p & comp[u]);
    if (score > best) {
      best = score;
      pivot_nbrs = comp[u];
    }
  }
  for (std::uint64_t rest = p & ~pivot_nbrs; rest != 0; rest &= rest - 1) {
    const int v = std::countr_zero(rest);
    const std::uint64_t bit = std::uint64_t{1} << v;
    bron_kerbosch(comp, n, r | bit, p & comp[v], x & comp[v], counter, out);
    p &= ~bit;
    x |= bit;
  }
}

}  // namespace

std::vector<SystemState> feasible_states(const ContentionGraph& g, const EnumerationLimits& limits) {
  CandidateCounter counter(limits);
  std::vector<SystemState> out;
  extend_independent(g, 0, 0, 0, counter, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SystemState> maximal_independent_sets(const ContentionGraph& g,
                                                  const EnumerationLimits& limits) {
  const std::uint64_t full = g.full_mask();
  std::vector<std::uint64_t> comp(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    comp[i] = full & ~(g.neighbor_mask(i) | (std::uint64_t{1} << i));
  }
  CandidateCounter counter(limits);
  std::vector<SystemState> out;
  bron_kerbosch(comp, g.size(), 0, full, 0, counter, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SystemState> maximum_independent_sets(const ContentionGraph& g,
                                                  const EnumerationLimits& limits) {
  auto maximal = maximal_independent_sets(g, limits);
  int best = 0;
  for (const auto& s : maximal) best = std::max(best, s.popcount());
  std::erase_if(maximal, [best](const SystemState& s) { return s.popcount() != best; });
  return maximal;
}

bool connected_states(const SystemState& a, const SystemState& b, const ContentionGraph& g) {
  if (!g.feasible(a) || !g.feasible(b)) {
    throw Error(ErrorCode::infeasible_state, "state is not an independent set of the graph");
  }
  return hamming_distance(a, b) == 1;
}

std::vector<Transition> transition_graph(const ContentionGraph& g, const EnumerationLimits& limits) {
  std::vector<Transition> out;
  for (const auto& left : feasible_states(g, limits)) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (left.test(i)) continue;
      const SystemState right = left.with(i, true);
      if (g.feasible(right)) out.push_back({left, right, i});
    }
  }
  return out;
}

}  // namespace csma
