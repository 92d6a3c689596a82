#pragma once

#include "ppp/model.hpp"

#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ppp {

struct PenaltySpec;

// p2 = 1.
struct NoPenalty
{};

// p2 = (min_{k != l} |phi_k - phi_l|)^s over the selected block.
// s = 1 on the means is the plain distance penalty; s = -1 favours similar
// values of the target.
struct AbsDiffPower
{
  Block target = Block::means;
  double s = 1.0;
};

// p2 = 1 if min_{k != l} |phi_k - phi_l| > delta, else 0.
struct Threshold
{
  Block target = Block::means;
  double delta = 0.0;
};

// p2 = max_j min_{k != l} |b_jk - b_jl| over a p x K coefficient matrix.
// Applied to a Gaussian mixture the matrix is the 1 x K row of means.
struct MaxMinMatrix
{};

// Multiplicative combination of factors.
struct Product
{
  std::vector<PenaltySpec> factors;
};

struct PenaltySpec
{
  std::variant<NoPenalty, AbsDiffPower, Threshold, MaxMinMatrix, Product> variant;

  // Throws ValidationError on non-positive threshold or empty product.
  void validate() const;

  // Whether p2 depends on the given parameter block.
  bool targets(Block block) const;
};

// Row-major p x K matrix of per-component coefficients.
struct CoefficientMatrix
{
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t row, std::size_t col) const { return values[row * cols + col]; }
};

// log p2 = -infinity marks a zero-prior configuration.
inline constexpr double zero_penalty = -std::numeric_limits<double>::infinity();

inline bool
is_zero_penalty(double log_penalty)
{
  return log_penalty == zero_penalty;
}

// Grammar:
//   spec    := "none" | absdiff | threshold | "maxmin" | product
//   absdiff := "absdiff:" target ":s=" real
//   threshold := "threshold:" target ":delta=" real
//   product := "product(" spec ("," spec)* ")"
//   target  := "mu" | "sigma2" | "pi"
PenaltySpec parse_penalty(std::string_view text);

// Inverse of parse_penalty.
std::string to_string(const PenaltySpec& spec);

// log p2(params). Pairwise penalties are 0 (p2 = 1) when K = 1.
double eval_log_penalty(const PenaltySpec& spec, const MixtureParams& params);

// log p2 on a coefficient matrix; only maxmin (and products of it) apply.
// Throws SelectorError for block-targeted variants.
double eval_log_penalty(const PenaltySpec& spec, const CoefficientMatrix& coefficients);

// min(1, p2(proposed) / p2(current)) from cached logs. Returns 0 when the
// proposal has zero penalty; throws InvalidStateError when the current state
// does.
double acceptance_from_logs(double log_proposed, double log_current);

double acceptance_probability(const PenaltySpec& spec,
                              const MixtureParams& proposed,
                              const MixtureParams& current);

} // namespace ppp
