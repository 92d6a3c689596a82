#include "ppp/oracle.hpp"

#include "ppp/error.hpp"
#include "ppp/rng.hpp"
#include "ppp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ppp {

namespace {

void
check_fixed(const FixedComponents& fixed)
{
  if (fixed.weights.size() != 2 || fixed.variances.size() != 2) {
    throw ValidationError("oracle works with exactly two components");
  }
  if (!(fixed.beta > 0.0)) {
    throw ValidationError("oracle: beta must be positive");
  }
  fixed.with_means(0.0, 1.0).validate();
}

double
log_target(const Dataset& data,
           const MixtureParams& params,
           double beta,
           const Hyperparams& hyper,
           const PenaltySpec& penalty)
{
  const double lp2 = eval_log_penalty(penalty, params);
  if (is_zero_penalty(lp2)) {
    return zero_penalty;
  }
  return log_likelihood(data, params) + log_p1(params, beta, hyper) + lp2;
}

// Unnormalised log masses on a square grid, -inf where the penalty is zero.
std::vector<double>
log_cell_masses(const Dataset& data,
                const FixedComponents& fixed,
                const Hyperparams& hyper,
                const PenaltySpec& penalty,
                const AxisSpec& axis,
                std::size_t subdivisions)
{
  const std::size_t nb = axis.bins;
  const double w = axis.width();
  const double step = w / static_cast<double>(subdivisions);
  std::vector<double> out(nb * nb, zero_penalty);
  std::vector<double> sub;
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      sub.clear();
      double top = zero_penalty;
      for (std::size_t a = 0; a < subdivisions; ++a) {
        for (std::size_t b = 0; b < subdivisions; ++b) {
          const double mu1 = axis.min + static_cast<double>(i) * w +
                             (static_cast<double>(a) + 0.5) * step;
          const double mu2 = axis.min + static_cast<double>(j) * w +
                             (static_cast<double>(b) + 0.5) * step;
          const double lt =
            log_target(data, fixed.with_means(mu1, mu2), fixed.beta, hyper, penalty);
          sub.push_back(lt);
          top = std::max(top, lt);
        }
      }
      if (is_zero_penalty(top)) {
        continue;
      }
      double s = 0.0;
      for (double v : sub) {
        s += std::exp(v - top);
      }
      out[i * nb + j] = top + std::log(s / static_cast<double>(sub.size()));
    }
  }
  return out;
}

DensityGrid
exponentiate(std::vector<double> logs, const AxisSpec& axis)
{
  const double top = *std::max_element(logs.begin(), logs.end());
  if (is_zero_penalty(top) || !std::isfinite(top)) {
    throw GridError("posterior is zero on every grid cell");
  }
  DensityGrid grid = empty_grid(axis, axis);
  for (std::size_t c = 0; c < logs.size(); ++c) {
    grid.mass[c] = std::exp(logs[c] - top);
  }
  grid.normalize();
  return grid;
}

} // namespace

GridPosterior
grid_posterior(const Dataset& data,
               const FixedComponents& fixed,
               const Hyperparams& hyper,
               const PenaltySpec& penalty,
               const AxisSpec& axis,
               std::size_t subdivisions)
{
  check_fixed(fixed);
  data.validate();
  if (data.n() > 10) {
    throw ValidationError("oracle grid is limited to datasets of at most 10 points");
  }
  if (axis.bins < 1 || axis.bins > 201 || !(axis.max > axis.min)) {
    throw ValidationError("oracle grid needs 1..201 bins over a non-empty interval");
  }
  if (subdivisions < 1) {
    throw ValidationError("oracle grid needs at least one evaluation point per cell");
  }
  return { exponentiate(log_cell_masses(data, fixed, hyper, penalty, axis, subdivisions),
                        axis),
           penalty };
}

double
grid_coverage(const Dataset& data,
              const FixedComponents& fixed,
              const Hyperparams& hyper,
              const PenaltySpec& penalty,
              const AxisSpec& axis)
{
  check_fixed(fixed);
  const double span = axis.max - axis.min;
  const AxisSpec wide{ axis.min - 0.5 * span, axis.max + 0.5 * span, 2 * axis.bins };
  const DensityGrid grid =
    exponentiate(log_cell_masses(data, fixed, hyper, penalty, wide, 1), wide);
  double inside = 0.0;
  for (std::size_t i = 0; i < wide.bins; ++i) {
    for (std::size_t j = 0; j < wide.bins; ++j) {
      const double x = wide.center(i);
      const double y = wide.center(j);
      if (x >= axis.min && x <= axis.max && y >= axis.min && y <= axis.max) {
        inside += grid.at(i, j);
      }
    }
  }
  return inside;
}

DensityGrid
constrained_chain_marginal(const Dataset& data,
                           const FixedComponents& fixed,
                           const Hyperparams& hyper,
                           const PenaltySpec& penalty,
                           const ConstrainedChainSettings& settings,
                           const AxisSpec& axis)
{
  check_fixed(fixed);
  ChainConfig config;
  config.k = 2;
  config.iterations = settings.iterations;
  config.burn_in = settings.burn_in;
  config.thin = settings.thin;
  config.seed = settings.seed;
  config.penalty = penalty;
  config.hyper = hyper;
  config.blocks = BlockSchedule{ false, false, false };
  config.validate();

  std::vector<double> sorted = data.observations;
  std::sort(sorted.begin(), sorted.end());
  const double q1 = sorted[sorted.size() / 4];
  const double q3 = sorted[(3 * sorted.size()) / 4];

  Rng rng(settings.seed);
  ChainState start = init_chain_at(data, config, fixed.with_means(q1, q3), fixed.beta, rng);
  const SampleStore store = run_chain(data, config, std::move(start), rng);

  std::vector<double> mu1;
  std::vector<double> mu2;
  mu1.reserve(store.draws.size());
  mu2.reserve(store.draws.size());
  for (const auto& d : store.draws) {
    mu1.push_back(d.means[0]);
    mu2.push_back(d.means[1]);
  }
  return grid_2d(mu1, mu2, axis, axis);
}

DensityGrid
reference_rw_sampler(const Dataset& data,
                     const FixedComponents& fixed,
                     const Hyperparams& hyper,
                     const PenaltySpec& penalty,
                     std::size_t steps,
                     double step_size,
                     std::uint64_t seed,
                     const AxisSpec& axis)
{
  check_fixed(fixed);
  data.validate();
  if (steps == 0) {
    throw ValidationError("random walk needs at least one step");
  }
  if (!(step_size >= 0.0)) {
    throw ValidationError("random walk step size must be non-negative");
  }
  Rng rng(seed);
  std::vector<double> sorted = data.observations;
  std::sort(sorted.begin(), sorted.end());
  double mu1 = sorted[sorted.size() / 4];
  double mu2 = sorted[(3 * sorted.size()) / 4];
  double current = log_target(data, fixed.with_means(mu1, mu2), fixed.beta, hyper, penalty);
  for (int attempt = 0; is_zero_penalty(current); ++attempt) {
    if (attempt == 1000) {
      throw InitializationError("random walk found no admissible starting point");
    }
    mu1 = axis.min + (axis.max - axis.min) * rng.uniform();
    mu2 = axis.min + (axis.max - axis.min) * rng.uniform();
    current = log_target(data, fixed.with_means(mu1, mu2), fixed.beta, hyper, penalty);
  }

  DensityGrid grid = empty_grid(axis, axis);
  const std::size_t nb = axis.bins;
  for (std::size_t s = 0; s < steps; ++s) {
    const double p1 = mu1 + step_size * rng.normal();
    const double p2 = mu2 + step_size * rng.normal();
    const double proposed = log_target(data, fixed.with_means(p1, p2), fixed.beta, hyper, penalty);
    if (!is_zero_penalty(proposed) &&
        (proposed >= current || rng.uniform() < std::exp(proposed - current))) {
      mu1 = p1;
      mu2 = p2;
      current = proposed;
    }
    const auto i = axis.locate(mu1);
    const auto j = axis.locate(mu2);
    if (i && j) {
      grid.mass[*i * nb + *j] += 1.0;
    }
  }
  grid.normalize();
  return grid;
}

double
tv_distance(const DensityGrid& a, const DensityGrid& b)
{
  if (a.axes != b.axes || a.mass.size() != b.mass.size()) {
    throw GridError("tv_distance: grids differ in shape or extent");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < a.mass.size(); ++c) {
    total += std::abs(a.mass[c] - b.mass[c]);
  }
  return 0.5 * total;
}

OracleReport
run_oracle(const Dataset& data,
           const FixedComponents& fixed,
           const Hyperparams& hyper,
           const PenaltySpec& penalty,
           const OracleSettings& settings)
{
  OracleReport report;
  report.grid = grid_posterior(data, fixed, hyper, penalty, settings.axis, settings.subdivisions);
  report.coverage = grid_coverage(data, fixed, hyper, penalty, settings.axis);
  report.chain =
    constrained_chain_marginal(data, fixed, hyper, penalty, settings.chain, settings.axis);
  report.walker = reference_rw_sampler(data,
                                       fixed,
                                       hyper,
                                       penalty,
                                       settings.rw_steps,
                                       settings.rw_step_size,
                                       settings.rw_seed,
                                       settings.axis);
  report.tv_grid_chain = tv_distance(report.grid.grid, report.chain);
  report.tv_grid_walker = tv_distance(report.grid.grid, report.walker);
  report.tv_chain_walker = tv_distance(report.chain, report.walker);
  return report;
}

} // namespace ppp
