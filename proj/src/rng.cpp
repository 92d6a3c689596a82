#include "ppp/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ppp {

Rng::Rng(std::uint64_t seed)
  : engine_(seed)
{
}

double
Rng::uniform()
{
  // 53 random bits, shifted by half an ulp so neither 0 nor 1 is produced.
  constexpr double scale = 1.0 / 9007199254740992.0;
  return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
}

double
Rng::normal()
{
  // Box-Muller, cosine branch only.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double
Rng::gamma(double shape, double rate)
{
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("gamma: shape and rate must be positive");
  }
  if (shape < 1.0) {
    // Boost: G(a) = G(a + 1) * U^(1/a).
    const double g = gamma(shape + 1.0, 1.0);
    return g * std::pow(uniform(), 1.0 / shape) / rate;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return d * v / rate;
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v / rate;
    }
  }
}

std::size_t
Rng::categorical(std::span<const double> weights)
{
  double total = 0.0;
  for (double w : weights) {
    total += w;
  }
  const double target = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) {
      return i;
    }
  }
  // Rounding left target at the very top; return the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) {
      return i;
    }
  }
  throw std::invalid_argument("categorical: no positive weight");
}

std::vector<double>
Rng::dirichlet(std::span<const double> concentration)
{
  std::vector<double> draw(concentration.size());
  double total = 0.0;
  for (std::size_t i = 0; i < draw.size(); ++i) {
    draw[i] = gamma(concentration[i], 1.0);
    total += draw[i];
  }
  for (double& d : draw) {
    d /= total;
  }
  return draw;
}

std::uint64_t
derive_seed(std::uint64_t base, std::uint64_t stream)
{
  std::uint64_t z = base + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace ppp
