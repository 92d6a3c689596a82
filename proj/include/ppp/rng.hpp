#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ppp {

// Seeded random stream owned by a single chain.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The variate transforms (normal, gamma, ...) are implemented here
// rather than taken from <random>, whose distributions are
// implementation-defined, so a seed reproduces the same draws on every
// toolchain.
class Rng
{
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform();

  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate);

  // Index drawn with probability proportional to weights[i].
  std::size_t categorical(std::span<const double> weights);

  std::vector<double> dirichlet(std::span<const double> concentration);

private:
  std::mt19937_64 engine_;
};

// Seed for stream `stream` derived from a base seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace ppp
