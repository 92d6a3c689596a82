#pragma once

#include "ppp/analysis.hpp"
#include "ppp/model.hpp"
#include "ppp/penalty.hpp"
#include "ppp/priors.hpp"

#include <cstdint>

namespace ppp {

// The parameters held fixed while the oracle explores (mu_1, mu_2).
struct FixedComponents
{
  std::vector<double> weights;
  std::vector<double> variances;
  double beta = 1.0;

  MixtureParams with_means(double mu1, double mu2) const
  {
    return { weights, { mu1, mu2 }, variances, {} };
  }
};

// Normalised L * p1 * p2 over a square (mu_1, mu_2) grid.
struct GridPosterior
{
  DensityGrid grid;
  PenaltySpec penalty;
};

// Evaluates log L + log p1 + log p2 at `subdivisions`^2 midpoints per cell
// (one midpoint = the cell centre), exponentiates relative to the maximum and
// normalises. Requires K = 2, n <= 10 and at most 201 bins per axis.
// Throws GridError if the penalty is zero on every cell.
GridPosterior grid_posterior(const Dataset& data,
                             const FixedComponents& fixed,
                             const Hyperparams& hyper,
                             const PenaltySpec& penalty,
                             const AxisSpec& axis,
                             std::size_t subdivisions = 1);

// Share of the posterior mass, computed on a grid twice as wide with the same
// cell width, that falls inside `axis` x `axis`.
double grid_coverage(const Dataset& data,
                     const FixedComponents& fixed,
                     const Hyperparams& hyper,
                     const PenaltySpec& penalty,
                     const AxisSpec& axis);

struct ConstrainedChainSettings
{
  std::size_t iterations = 1'000'000;
  std::size_t burn_in = 10'000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
};

// Runs the sampler with weights, variances and beta frozen at `fixed`
// (allocation and mean-block updates only) and histograms (mu_1, mu_2).
DensityGrid constrained_chain_marginal(const Dataset& data,
                                       const FixedComponents& fixed,
                                       const Hyperparams& hyper,
                                       const PenaltySpec& penalty,
                                       const ConstrainedChainSettings& settings,
                                       const AxisSpec& axis);

// Random-walk Metropolis directly on (mu_1, mu_2) against L * p1 * p2, with
// isotropic normal steps of the given size. Every step is histogrammed.
DensityGrid reference_rw_sampler(const Dataset& data,
                                 const FixedComponents& fixed,
                                 const Hyperparams& hyper,
                                 const PenaltySpec& penalty,
                                 std::size_t steps,
                                 double step_size,
                                 std::uint64_t seed,
                                 const AxisSpec& axis);

// 0.5 * sum |a - b|. Throws GridError unless both grids share their axes.
double tv_distance(const DensityGrid& a, const DensityGrid& b);

struct OracleSettings
{
  AxisSpec axis{ -3.0, 5.0, 101 };
  std::size_t subdivisions = 3;
  ConstrainedChainSettings chain;
  std::size_t rw_steps = 4'000'000;
  double rw_step_size = 1.0;
  std::uint64_t rw_seed = 2;
};

struct OracleReport
{
  GridPosterior grid;
  DensityGrid chain;
  DensityGrid walker;
  double coverage = 0.0;
  double tv_grid_chain = 0.0;
  double tv_grid_walker = 0.0;
  double tv_chain_walker = 0.0;
};

OracleReport run_oracle(const Dataset& data,
                        const FixedComponents& fixed,
                        const Hyperparams& hyper,
                        const PenaltySpec& penalty,
                        const OracleSettings& settings);

} // namespace ppp
