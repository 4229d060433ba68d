#pragma once

// Reference computations for the tests. Deliberately naive and independent
// of the library: plain loops over bit masks, direct closed forms.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Edges = std::vector<std::pair<int, int>>;  // 0-based

inline bool independent(std::uint64_t mask, const Edges& edges) {
  for (auto [a, b] : edges) {
    if ((mask >> a & 1) && (mask >> b & 1)) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> independent_sets(int L, const Edges& edges) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << L); ++m) {
    if (independent(m, edges)) out.push_back(m);
  }
  return out;
}

inline int bits(std::uint64_t m) { return __builtin_popcountll(m); }

inline std::vector<std::uint64_t> maximal_sets(int L, const Edges& edges) {
  std::vector<std::uint64_t> out;
  for (auto m : independent_sets(L, edges)) {
    bool grow = false;
    for (int i = 0; i < L && !grow; ++i) {
      if (!(m >> i & 1) && independent(m | std::uint64_t{1} << i, edges)) grow = true;
    }
    if (!grow) out.push_back(m);
  }
  return out;
}

inline std::vector<std::uint64_t> maximum_sets(int L, const Edges& edges) {
  auto all = independent_sets(L, edges);
  int best = 0;
  for (auto m : all) best = std::max(best, bits(m));
  std::vector<std::uint64_t> out;
  for (auto m : all) {
    if (bits(m) == best) out.push_back(m);
  }
  return out;
}

/// Share of maximum independent sets containing each link.
inline std::vector<double> boe(int L, const Edges& edges) {
  auto sets = maximum_sets(L, edges);
  std::vector<double> x(L, 0.0);
  for (auto m : sets) {
    for (int i = 0; i < L; ++i) x[i] += (m >> i & 1);
  }
  for (auto& v : x) v /= sets.size();
  return x;
}

/// Normalized product-form probabilities by direct multiplication.
inline std::map<std::uint64_t, double> product_form(int L, const Edges& edges, const std::vector<double>& c) {
  std::map<std::uint64_t, double> p;
  double total = 0.0;
  for (auto m : independent_sets(L, edges)) {
    double w = 1.0;
    for (int i = 0; i < L; ++i) {
      if (m >> i & 1) w /= c[i];
    }
    p[m] = w;
    total += w;
  }
  for (auto& [m, w] : p) w /= total;
  return p;
}

inline std::vector<double> throughputs(int L, const std::map<std::uint64_t, double>& p) {
  std::vector<double> x(L, 0.0);
  for (auto [m, w] : p) {
    for (int i = 0; i < L; ++i) {
      if (m >> i & 1) x[i] += w;
    }
  }
  return x;
}

// Closed forms on the four-link graph 1-2, 2-3, 2-4, 3-4 with uniform c.
struct G1Closed {
  double idle, single, pair;
  double x1, x2, x3;
};

inline G1Closed g1_closed_form(double c) {
  G1Closed r{};
  r.idle = 1.0 / (1.0 + 4.0 / c + 2.0 / (c * c));
  r.single = r.idle / c;
  r.pair = r.idle / (c * c);
  r.x1 = r.single + 2 * r.pair;
  r.x2 = r.single;
  r.x3 = r.single + r.pair;
  return r;
}

inline Edges g1_edges() { return {{0, 1}, {1, 2}, {1, 3}, {2, 3}}; }
inline Edges cycle_edges(int n) {
  Edges e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return e;
}
inline Edges path_edges(int n) {
  Edges e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return e;
}

// Equilibrium residual-life CDFs.
inline double residual_uniform_0h(double t, double h) { return t <= 0 ? 0 : t >= h ? 1 : t * (2 * h - t) / (h * h); }
inline double residual_deterministic(double t, double v) { return t <= 0 ? 0 : t >= v ? 1 : t / v; }
inline double residual_exponential(double t, double m) { return t <= 0 ? 0 : 1 - std::exp(-t / m); }

/// Brute-force KS: compares the CDF with the empirical CDF just before and at each sample.
template <class F>
double ks(const std::vector<double>& xs, F cdf) {
  double d = 0.0;
  const double n = xs.size();
  for (double x : xs) {
    double below = 0, at = 0;
    for (double y : xs) {
      below += y < x;
      at += y <= x;
    }
    d = std::max({d, std::abs(at / n - cdf(x)), std::abs(below / n - cdf(x))});
  }
  return d;
}

/// Random simple graph on L vertices with edge probability p.
inline Edges random_edges(int L, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  Edges e;
  for (int a = 0; a < L; ++a) {
    for (int b = a + 1; b < L; ++b) {
      if (coin(rng)) e.push_back({a, b});
    }
  }
  return e;
}

/// Graph document text with labels "1".."L".
inline std::string document(int L, const Edges& edges) {
  std::ostringstream o;
  o << "{\"links\": [";
  for (int i = 0; i < L; ++i) o << (i ? ", " : "") << '"' << i + 1 << '"';
  o << "], \"edges\": [";
  for (std::size_t k = 0; k < edges.size(); ++k) {
    o << (k ? ", " : "") << "[\"" << edges[k].first + 1 << "\", \"" << edges[k].second + 1 << "\"]";
  }
  o << "]}";
  return o.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace oracle
