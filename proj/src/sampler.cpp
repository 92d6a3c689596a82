#include "ppp/sampler.hpp"

#include "ppp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace ppp {

namespace {

constexpr int max_init_attempts = 1000;

double
empirical_quantile(const std::vector<double>& sorted, double p)
{
  // Linear interpolation between order statistics (type 7).
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double
sample_variance(const std::vector<double>& ys)
{
  if (ys.size() < 2) {
    return 1.0;
  }
  double mean = 0.0;
  for (double y : ys) {
    mean += y;
  }
  mean /= static_cast<double>(ys.size());
  double ss = 0.0;
  for (double y : ys) {
    ss += (y - mean) * (y - mean);
  }
  return ss / static_cast<double>(ys.size() - 1);
}

// Proposes `proposal` for one block and applies the penalty-ratio accept.
// Untargeted blocks are taken unconditionally without touching the stream.
bool
update_block(ChainState& state,
             Block block,
             std::vector<double> proposal,
             const ChainConfig& config,
             Rng& rng)
{
  if (!config.penalty.targets(block)) {
    state.params.block(block) = std::move(proposal);
    return true;
  }
  auto& slot = state.params.block(block);
  std::swap(slot, proposal);
  const double log_proposed = eval_log_penalty(config.penalty, state.params);
  const double accept = acceptance_from_logs(log_proposed, state.log_penalty);
  if (accept >= 1.0 || (accept > 0.0 && rng.uniform() < accept)) {
    state.log_penalty = log_proposed;
    return true;
  }
  std::swap(slot, proposal);
  return false;
}

} // namespace

void
ChainConfig::validate() const
{
  if (k < 1) {
    throw ValidationError("k must be at least 1");
  }
  if (thin < 1) {
    throw ValidationError("thin must be at least 1");
  }
  if (burn_in >= iterations) {
    throw ValidationError("burn-in must be smaller than the number of iterations");
  }
  penalty.validate();
  hyper.validate();
}

ChainState
init_chain_at(const Dataset& data,
              const ChainConfig& config,
              MixtureParams start,
              double beta,
              Rng& rng)
{
  start.validate();
  ChainState state;
  state.params = std::move(start);
  state.beta = beta;
  state.log_penalty = eval_log_penalty(config.penalty, state.params);
  const double lo = data.min();
  const double hi = data.max();
  double scale = 0.0;
  for (double v : state.params.variances) {
    scale += v / static_cast<double>(state.params.k());
  }
  for (int attempt = 0; is_zero_penalty(state.log_penalty); ++attempt) {
    if (attempt == max_init_attempts) {
      throw InitializationError("no admissible starting point under penalty '" +
                                to_string(config.penalty) + "' after " +
                                std::to_string(max_init_attempts) + " attempts");
    }
    // Only the blocks the penalty looks at can rescue the start.
    if (config.penalty.targets(Block::means)) {
      for (double& mu : state.params.means) {
        mu = lo + (hi - lo) * rng.uniform();
      }
      std::sort(state.params.means.begin(), state.params.means.end());
    }
    if (config.penalty.targets(Block::variances)) {
      for (double& v : state.params.variances) {
        v = scale * (0.25 + 1.75 * rng.uniform());
      }
    }
    if (config.penalty.targets(Block::weights)) {
      state.params.weights = rng.dirichlet(std::vector<double>(state.params.k(), 1.0));
    }
    state.log_penalty = eval_log_penalty(config.penalty, state.params);
  }
  state.alloc = sample_allocations(data, state.params, rng);
  return state;
}

ChainState
init_chain(const Dataset& data, const ChainConfig& config, Rng& rng)
{
  config.validate();
  data.validate();
  const std::size_t k = config.k;
  const Hyperparams& hyper = config.hyper;
  MixtureParams start;
  double beta = hyper.g / hyper.h;
  if (config.init == InitStrategy::quantile) {
    std::vector<double> sorted = data.observations;
    std::sort(sorted.begin(), sorted.end());
    const double var = sample_variance(sorted);
    for (std::size_t j = 0; j < k; ++j) {
      const double p = static_cast<double>(j + 1) / static_cast<double>(k + 1);
      start.means.push_back(empirical_quantile(sorted, p));
    }
    start.weights.assign(k, 1.0 / static_cast<double>(k));
    start.variances.assign(k, var > 0.0 ? var : 1.0);
    // Uniform weights may miss 1 by an ulp; renormalise exactly.
    double total = 0.0;
    for (double w : start.weights) {
      total += w;
    }
    start.weights.back() += 1.0 - total;
  } else {
    beta = rng.gamma(hyper.g, hyper.h);
    std::vector<double> conc(k, hyper.dirichlet_delta);
    start.weights = rng.dirichlet(conc);
    for (std::size_t j = 0; j < k; ++j) {
      start.means.push_back(rng.normal(hyper.xi, 1.0 / std::sqrt(hyper.kappa)));
    }
    for (std::size_t j = 0; j < k; ++j) {
      start.variances.push_back(1.0 / rng.gamma(hyper.alpha, beta));
    }
  }
  return init_chain_at(data, config, std::move(start), beta, rng);
}

void
sweep(ChainState& state, const Dataset& data, const ChainConfig& config, Rng& rng)
{
  const Hyperparams& hyper = config.hyper;

  state.alloc = sample_allocations(data, state.params, rng);

  if (config.blocks.weights) {
    update_block(state, Block::weights, sample_weights(state.alloc, hyper, rng), config, rng);
  }

  state.mean_block_accepted =
    update_block(state,
                 Block::means,
                 sample_means_conditional(data, state.alloc, state.params.variances, hyper, rng),
                 config,
                 rng);

  if (config.blocks.variances) {
    update_block(
      state,
      Block::variances,
      sample_variances(data, state.alloc, state.params.means, state.beta, hyper, rng),
      config,
      rng);
  }

  if (config.blocks.beta) {
    state.beta = sample_beta(state.params.variances, hyper, rng);
  }
  ++state.iteration;
}

SampleStore
run_chain(const Dataset& data, const ChainConfig& config, ChainState state, Rng& rng)
{
  config.validate();
  SampleStore store;
  store.k = state.params.k();
  store.draws.reserve(config.retained());
  std::size_t accepted = 0;
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    sweep(state, data, config, rng);
    if (state.mean_block_accepted) {
      ++accepted;
    }
    if (it > config.burn_in && (it - config.burn_in) % config.thin == 0) {
      store.draws.push_back(DrawRecord{ it,
                                        state.mean_block_accepted,
                                        state.beta,
                                        state.params.weights,
                                        state.params.means,
                                        state.params.variances });
    }
  }
  store.acceptance_rate =
    static_cast<double>(accepted) / static_cast<double>(config.iterations);
  return store;
}

SampleStore
run_chain(const Dataset& data, const ChainConfig& config)
{
  Rng rng(config.seed);
  ChainState state = init_chain(data, config, rng);
  return run_chain(data, config, std::move(state), rng);
}

std::vector<SampleStore>
run_chains(const Dataset& data, const ChainConfig& config, std::size_t chains)
{
  config.validate();
  std::vector<SampleStore> stores(chains);
  std::vector<std::exception_ptr> errors(chains);
  {
    std::vector<std::jthread> workers;
    for (std::size_t c = 0; c < chains; ++c) {
      workers.emplace_back([&, c] {
        try {
          ChainConfig own = config;
          own.seed = derive_seed(config.seed, c);
          stores[c] = run_chain(data, own);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return stores;
}

void
write_samples_csv(const std::filesystem::path& path, const SampleStore& store)
{
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << "iter,accept_mu,beta";
  for (const char* name : { "pi", "mu", "sigma2" }) {
    for (std::size_t j = 1; j <= store.k; ++j) {
      out << ',' << name << '_' << j;
    }
  }
  out << '\n';
  for (const auto& d : store.draws) {
    out << d.iter << ',' << (d.accept_mu ? 1 : 0) << ',' << format_decimal(d.beta);
    for (const auto* block : { &d.weights, &d.means, &d.variances }) {
      for (double v : *block) {
        out << ',' << format_decimal(v);
      }
    }
    out << '\n';
  }
}

SampleStore
read_samples_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open samples file " + path.string());
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw ParseError(path.string() + ": empty file");
  }
  std::vector<std::string> names;
  {
    std::stringstream ss(header);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      names.push_back(cell);
    }
  }
  if (names.size() < 6 || (names.size() - 3) % 3 != 0 || names[0] != "iter" ||
      names[1] != "accept_mu" || names[2] != "beta") {
    throw ParseError(path.string() + ": not a samples file (bad header)");
  }
  SampleStore store;
  store.k = (names.size() - 3) / 3;
  const std::size_t k = store.k;
  for (std::size_t j = 0; j < k; ++j) {
    const std::string suffix = "_" + std::to_string(j + 1);
    if (names[3 + j] != "pi" + suffix || names[3 + k + j] != "mu" + suffix ||
        names[3 + 2 * k + j] != "sigma2" + suffix) {
      throw ParseError(path.string() + ": unexpected column order in header");
    }
  }

  std::string line;
  std::size_t row = 1;
  std::size_t accepted = 0;
  std::vector<double> cells(names.size());
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) {
      continue;
    }
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (col < cells.size()) {
      auto [ptr, ec] = std::from_chars(p, end, cells[col]);
      if (ec != std::errc()) {
        throw ParseError(path.string() + ":" + std::to_string(row) + ": bad number");
      }
      ++col;
      p = ptr;
      if (p == end) {
        break;
      }
      if (*p != ',') {
        throw ParseError(path.string() + ":" + std::to_string(row) + ": bad separator");
      }
      ++p;
    }
    if (col != cells.size() || p != end) {
      throw ParseError(path.string() + ":" + std::to_string(row) + ": wrong column count");
    }
    DrawRecord d;
    d.iter = static_cast<std::size_t>(cells[0]);
    d.accept_mu = cells[1] != 0.0;
    d.beta = cells[2];
    d.weights.assign(cells.begin() + 3, cells.begin() + 3 + k);
    d.means.assign(cells.begin() + 3 + k, cells.begin() + 3 + 2 * k);
    d.variances.assign(cells.begin() + 3 + 2 * k, cells.end());
    accepted += d.accept_mu ? 1 : 0;
    store.draws.push_back(std::move(d));
  }
  // The sweep-level rate is not persisted; report the retained-draw rate.
  store.acceptance_rate = store.draws.empty()
                            ? 1.0
                            : static_cast<double>(accepted) /
                                static_cast<double>(store.draws.size());
  return store;
}

} // namespace ppp
