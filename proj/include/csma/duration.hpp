#pragma once

// Countdown / transmission duration laws and their equilibrium (residual
// life) distributions.
//
// Text grammar:  exp:MEAN | uni:LO,HI | det:VALUE | erlang:STAGES,STAGE_MEAN
//                | mix:W1*SPEC1|W2*SPEC2...   (components may not be mixtures)

#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace csma {

class DurationDistribution {
 public:
  struct Exponential { double mean; };
  struct Uniform { double lo, hi; };
  struct Deterministic { double value; };
  struct Erlang { int stages; double stage_mean; };
  struct Mixture {
    std::vector<double> weights;
    std::vector<DurationDistribution> parts;
  };

  static DurationDistribution exponential(double mean);
  static DurationDistribution uniform(double lo, double hi);
  static DurationDistribution deterministic(double value);
  static DurationDistribution erlang(int stages, double stage_mean);
  static DurationDistribution mixture(std::vector<double> weights, std::vector<DurationDistribution> parts);

  static DurationDistribution parse(std::string_view text);

  double mean() const;
  double cdf(double t) const;
  /// CDF of the residual life seen at a random instant:
  /// integral_0^t (1 - F(u)) du / mean.
  double equilibrium_cdf(double t) const;
  double sample(std::mt19937_64& rng) const;
  std::string to_string() const;

  const auto& kind() const noexcept { return kind_; }

 private:
  using Kind = std::variant<Exponential, Uniform, Deterministic, Erlang, Mixture>;
  explicit DurationDistribution(Kind k) : kind_(std::move(k)) {}

  // Integral of the survival function over [0, t].
  double survival_integral(double t) const;

  Kind kind_;
};

/// Uniform on the open interval (0, 1) from the top 53 bits of one draw.
inline double unit_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

}  // namespace csma
