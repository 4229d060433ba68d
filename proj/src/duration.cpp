#include "csma/duration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "csma/error.hpp"

namespace csma {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void bad(const std::string& why) { throw Error(ErrorCode::invalid_parameter, why); }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double number(std::string_view s) {
  const std::string buf(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    bad("not a number: '" + buf + "'");
  }
  if (used != buf.size() || !std::isfinite(v)) bad("not a number: '" + buf + "'");
  return v;
}

int integer(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad("not an integer: '" + std::string(s) + "'");
  return v;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(12);
  o << v;
  return o.str();
}

}  // namespace

DurationDistribution DurationDistribution::exponential(double mean) {
  if (!(mean > 0.0)) bad("exponential mean must be positive");
  return DurationDistribution(Exponential{mean});
}

DurationDistribution DurationDistribution::uniform(double lo, double hi) {
  if (!(lo >= 0.0 && lo < hi)) bad("uniform requires 0 <= lo < hi");
  return DurationDistribution(Uniform{lo, hi});
}

DurationDistribution DurationDistribution::deterministic(double value) {
  if (!(value > 0.0)) bad("deterministic value must be positive");
  return DurationDistribution(Deterministic{value});
}

DurationDistribution DurationDistribution::erlang(int stages, double stage_mean) {
  if (stages < 1) bad("erlang needs at least one stage");
  if (!(stage_mean > 0.0)) bad("erlang stage mean must be positive");
  return DurationDistribution(Erlang{stages, stage_mean});
}

DurationDistribution DurationDistribution::mixture(std::vector<double> weights,
                                                   std::vector<DurationDistribution> parts) {
  if (weights.empty() || weights.size() != parts.size()) bad("mixture needs one weight per component");
  for (double w : weights) {
    if (!(w > 0.0)) bad("mixture weights must be positive");
  }
  if (std::abs(std::accumulate(weights.begin(), weights.end(), 0.0) - 1.0) > 1e-9) {
    bad("mixture weights must sum to 1");
  }
  return DurationDistribution(Mixture{std::move(weights), std::move(parts)});
}

DurationDistribution DurationDistribution::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) bad("distribution must look like kind:params, got '" + std::string(text) + "'");
  const auto kind = text.substr(0, colon);
  const auto body = text.substr(colon + 1);
  if (kind == "mix") {
    std::vector<double> weights;
    std::vector<DurationDistribution> parts;
    for (auto item : split(body, '|')) {
      const auto star = item.find('*');
      if (star == std::string_view::npos) bad("mixture component must be W*SPEC");
      const auto spec = item.substr(star + 1);
      if (spec.substr(0, 4) == "mix:") bad("nested mixtures are not supported");
      weights.push_back(number(item.substr(0, star)));
      parts.push_back(parse(spec));
    }
    return mixture(std::move(weights), std::move(parts));
  }
  const auto args = split(body, ',');
  auto want = [&](std::size_t n) {
    if (args.size() != n) bad("'" + std::string(kind) + "' takes " + std::to_string(n) + " parameter(s)");
  };
  if (kind == "exp") {
    want(1);
    return exponential(number(args[0]));
  }
  if (kind == "uni") {
    want(2);
    return uniform(number(args[0]), number(args[1]));
  }
  if (kind == "det") {
    want(1);
    return deterministic(number(args[0]));
  }
  if (kind == "erlang") {
    want(2);
    return erlang(integer(args[0]), number(args[1]));
  }
  bad("unknown distribution kind '" + std::string(kind) + "'");
}

double DurationDistribution::mean() const {
  return std::visit(overloaded{
                        [](const Exponential& d) { return d.mean; },
                        [](const Uniform& d) { return 0.5 * (d.lo + d.hi); },
                        [](const Deterministic& d) { return d.value; },
                        [](const Erlang& d) { return d.stages * d.stage_mean; },
                        [](const Mixture& d) {
                          double m = 0.0;
                          for (std::size_t k = 0; k < d.parts.size(); ++k) m += d.weights[k] * d.parts[k].mean();
                          return m;
                        },
                    },
                    kind_);
}

namespace {

// P(Poisson(x) <= n) = sum_{m=0}^{n} e^{-x} x^m / m!
double poisson_cdf(int n, double x) {
  double term = std::exp(-x);
  double sum = term;
  for (int m = 1; m <= n; ++m) {
    term *= x / m;
    sum += term;
  }
  return std::min(sum, 1.0);
}

}  // namespace

double DurationDistribution::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  return std::visit(overloaded{
                        [t](const Exponential& d) { return -std::expm1(-t / d.mean); },
                        [t](const Uniform& d) { return std::clamp((t - d.lo) / (d.hi - d.lo), 0.0, 1.0); },
                        [t](const Deterministic& d) { return t >= d.value ? 1.0 : 0.0; },
                        [t](const Erlang& d) { return 1.0 - poisson_cdf(d.stages - 1, t / d.stage_mean); },
                        [t](const Mixture& d) {
                          double f = 0.0;
                          for (std::size_t k = 0; k < d.parts.size(); ++k) f += d.weights[k] * d.parts[k].cdf(t);
                          return f;
                        },
                    },
                    kind_);
}

double DurationDistribution::survival_integral(double t) const {
  if (t <= 0.0) return 0.0;
  return std::visit(overloaded{
                        [t](const Exponential& d) { return -d.mean * std::expm1(-t / d.mean); },
                        [t](const Uniform& d) {
                          if (t <= d.lo) return t;
                          const double u = std::min(t, d.hi);
                          const double w = d.hi - d.lo;
                          return d.lo + (w * w - (d.hi - u) * (d.hi - u)) / (2.0 * w);
                        },
                        [t](const Deterministic& d) { return std::min(t, d.value); },
                        [t](const Erlang& d) {
                          // sum_{n<k} int_0^t e^{-u/th}(u/th)^n/n! du = th * sum_{n<k} P(Poisson(t/th) > n)
                          const double x = t / d.stage_mean;
                          double acc = 0.0;
                          for (int n = 0; n < d.stages; ++n) acc += 1.0 - poisson_cdf(n, x);
                          return d.stage_mean * acc;
                        },
                        [t](const Mixture& d) {
                          double acc = 0.0;
                          for (std::size_t k = 0; k < d.parts.size(); ++k) {
                            acc += d.weights[k] * d.parts[k].survival_integral(t);
                          }
                          return acc;
                        },
                    },
                    kind_);
}

double DurationDistribution::equilibrium_cdf(double t) const {
  return std::clamp(survival_integral(t) / mean(), 0.0, 1.0);
}

double DurationDistribution::sample(std::mt19937_64& rng) const {
  return std::visit(overloaded{
                        [&](const Exponential& d) { return -d.mean * std::log(unit_open(rng)); },
                        [&](const Uniform& d) { return d.lo + (d.hi - d.lo) * unit_open(rng); },
                        [&](const Deterministic& d) { return d.value; },
                        [&](const Erlang& d) {
                          double acc = 0.0;
                          for (int k = 0; k < d.stages; ++k) acc -= d.stage_mean * std::log(unit_open(rng));
                          return acc;
                        },
                        [&](const Mixture& d) {
                          const double u = unit_open(rng);
                          double cum = 0.0;
                          for (std::size_t k = 0; k + 1 < d.parts.size(); ++k) {
                            cum += d.weights[k];
                            if (u < cum) return d.parts[k].sample(rng);
                          }
                          return d.parts.back().sample(rng);
                        },
                    },
                    kind_);
}

std::string DurationDistribution::to_string() const {
  return std::visit(overloaded{
                        [](const Exponential& d) { return "exp:" + fmt(d.mean); },
                        [](const Uniform& d) { return "uni:" + fmt(d.lo) + "," + fmt(d.hi); },
                        [](const Deterministic& d) { return "det:" + fmt(d.value); },
                        [](const Erlang& d) { return "erlang:" + std::to_string(d.stages) + "," + fmt(d.stage_mean); },
                        [](const Mixture& d) {
                          std::string out = "mix:";
                          for (std::size_t k = 0; k < d.parts.size(); ++k) {
                            if (k > 0) out += "|";
                            out += fmt(d.weights[k]) + "*" + d.parts[k].to_string();
                          }
                          return out;
                        },
                    },
                    kind_);
}

}  // namespace csma
