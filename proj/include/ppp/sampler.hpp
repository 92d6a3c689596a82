#pragma once

#include "ppp/model.hpp"
#include "ppp/penalty.hpp"
#include "ppp/priors.hpp"
#include "ppp/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ppp {

enum class InitStrategy
{
  quantile,
  prior
};

// Which of the optional blocks a sweep updates. Allocations and means are
// always updated; the oracle switches the rest off to hold them fixed.
struct BlockSchedule
{
  bool weights = true;
  bool variances = true;
  bool beta = true;
};

struct ChainConfig
{
  std::size_t k = 2;
  std::size_t iterations = 20000;
  std::size_t burn_in = 5000;
  std::size_t thin = 2;
  std::uint64_t seed = 1;
  PenaltySpec penalty;
  Hyperparams hyper;
  InitStrategy init = InitStrategy::quantile;
  BlockSchedule blocks;

  void validate() const;

  // floor((iterations - burn_in) / thin)
  std::size_t retained() const { return (iterations - burn_in) / thin; }
};

struct ChainState
{
  MixtureParams params;
  double beta = 1.0;
  LatentAllocations alloc;
  // Always equal to eval_log_penalty(config.penalty, params), never the
  // zero-penalty marker.
  double log_penalty = 0.0;
  std::size_t iteration = 0;
  bool mean_block_accepted = true;
};

struct DrawRecord
{
  std::size_t iter = 0;
  bool accept_mu = true;
  double beta = 0.0;
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  MixtureParams params() const { return { weights, means, variances, {} }; }

  const std::vector<double>& block(Block b) const
  {
    return b == Block::weights ? weights : b == Block::means ? means : variances;
  }
};

struct SampleStore
{
  std::size_t k = 0;
  std::vector<DrawRecord> draws;
  // Fraction of sweeps in which the proposed mean block was accepted.
  double acceptance_rate = 1.0;
};

// Builds the starting state. Quantile start: mu_k at the k/(K+1) sample
// quantiles, sigma_k^2 at the sample variance, uniform weights, beta = g/h.
// Prior start: everything drawn from p1. If the penalty is zero at the start,
// the targeted blocks are redrawn (means uniformly over the data range,
// variances around their starting scale, weights from a flat Dirichlet), up
// to 1000 times, before InitializationError is thrown.
ChainState init_chain(const Dataset& data, const ChainConfig& config, Rng& rng);

// Same retry and allocation logic from caller-supplied parameters.
ChainState init_chain_at(const Dataset& data,
                         const ChainConfig& config,
                         MixtureParams start,
                         double beta,
                         Rng& rng);

// One systematic sweep: allocations, weights, means, variances, beta.
// Each block is drawn from its p1 full conditional; a block that the penalty
// depends on is then accepted with probability min(1, p2(new) / p2(old)).
void sweep(ChainState& state, const Dataset& data, const ChainConfig& config, Rng& rng);

SampleStore run_chain(const Dataset& data, const ChainConfig& config);

// Runs from an explicit state with a caller-owned stream.
SampleStore run_chain(const Dataset& data,
                      const ChainConfig& config,
                      ChainState state,
                      Rng& rng);

// `chains` independent chains on separate threads; chain c uses
// derive_seed(config.seed, c).
std::vector<SampleStore> run_chains(const Dataset& data,
                                    const ChainConfig& config,
                                    std::size_t chains);

// Header: iter,accept_mu,beta,pi_1..pi_K,mu_1..mu_K,sigma2_1..sigma2_K
void write_samples_csv(const std::filesystem::path& path, const SampleStore& store);
SampleStore read_samples_csv(const std::filesystem::path& path);

} // namespace ppp
