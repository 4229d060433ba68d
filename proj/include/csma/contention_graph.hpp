#pragma once

// Contention graph, system states and independent-set enumeration.
//
// Links are vertices; an edge joins two links whose transmitters sense each
// other. A system state is the set of transmitting links and is feasible iff
// it is an independent set of the graph.

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace csma {

inline constexpr std::size_t kMaxLinks = 64;

/// Transmit bits of all links; bit i is link i. Printed with link 0 first.
class SystemState {
 public:
  SystemState() = default;
  SystemState(std::uint64_t bits, std::size_t size);

  /// Parses "1010"-style strings (link 0 first).
  static SystemState from_string(std::string_view bits);

  std::size_t size() const noexcept { return size_; }
  std::uint64_t bits() const noexcept { return bits_; }
  int popcount() const noexcept { return std::popcount(bits_); }
  bool test(std::size_t link) const noexcept { return (bits_ >> link) & 1u; }
  SystemState with(std::size_t link, bool on) const;

  std::string to_string() const;

  bool operator==(const SystemState&) const = default;

  // Canonical order: popcount first, then lexicographic over the bit string
  // read from link 0 with a set bit sorting first.
  std::strong_ordering operator<=>(const SystemState& other) const noexcept;

 private:
  std::uint64_t bits_ = 0;
  std::size_t size_ = 0;
};

inline int hamming_distance(const SystemState& a, const SystemState& b) {
  return std::popcount(a.bits() ^ b.bits());
}

struct EnumerationLimits {
  std::uint64_t max_candidates = std::uint64_t{1} << 24;
};

class ContentionGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  /// Validates labels (non-empty, unique) and edges (in range, no self-edges).
  /// Duplicate edges are merged.
  ContentionGraph(std::vector<std::string> labels, const std::vector<Edge>& edges);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t link) const { return labels_.at(link); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  bool adjacent(std::size_t a, std::size_t b) const noexcept { return (adjacency_[a] >> b) & 1u; }
  std::uint64_t neighbor_mask(std::size_t link) const noexcept { return adjacency_[link]; }
  std::vector<std::size_t> neighbors(std::size_t link) const;
  std::size_t degree(std::size_t link) const noexcept { return std::popcount(adjacency_[link]); }
  std::size_t max_degree() const noexcept;
  std::uint64_t full_mask() const noexcept;

  /// Edges with first < second, ascending.
  std::vector<Edge> edges() const;

  bool feasible(const SystemState& s) const noexcept;
  bool feasible(std::uint64_t bits) const noexcept;

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> adjacency_;
};

/// Parsed graph document: links, edges and the optional "c" field expanded
/// to one value per link (a scalar is broadcast).
struct GraphDocument {
  ContentionGraph graph;
  std::optional<std::vector<double>> c;
  bool c_uniform = false;
};

GraphDocument parse_graph_document(std::string_view text);
ContentionGraph parse_graph(std::string_view text);

/// All independent sets (the all-zero state included), canonical order.
std::vector<SystemState> feasible_states(const ContentionGraph& g,
                                         const EnumerationLimits& limits = {});

/// Independent sets not contained in a larger one (pivoting Bron-Kerbosch on
/// the complement graph), canonical order.
std::vector<SystemState> maximal_independent_sets(const ContentionGraph& g,
                                                  const EnumerationLimits& limits = {});

/// Maximal independent sets of the largest cardinality, canonical order.
std::vector<SystemState> maximum_independent_sets(const ContentionGraph& g,
                                                  const EnumerationLimits& limits = {});

/// True iff one state equals the other plus exactly one transmitter.
bool connected_states(const SystemState& a, const SystemState& b, const ContentionGraph& g);

struct Transition {
  SystemState left;
  SystemState right;
  std::size_t toggled_link;
};

/// Every connected pair once; left has fewer transmitters.
std::vector<Transition> transition_graph(const ContentionGraph& g,
                                         const EnumerationLimits& limits = {});

}  // namespace csma
