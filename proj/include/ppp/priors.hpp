#pragma once

#include "ppp/model.hpp"
#include "ppp/rng.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace ppp {

// Constants of the hierarchical conjugate prior
//   pi ~ Dirichlet(delta, ..., delta)
//   mu_k ~ N(xi, 1/kappa)
//   1/sigma_k^2 ~ Gamma(alpha, beta),  beta ~ Gamma(g, h)
struct Hyperparams
{
  double xi = 0.0;
  double kappa = 1.0;
  double alpha = 2.0;
  double g = 0.2;
  double h = 10.0;
  double dirichlet_delta = 1.0;

  void validate() const;
};

// Empirical Bayes defaults: xi = midrange, kappa = 1/R^2, alpha = 2,
// g = 0.2, h = 10/R^2, delta = 1, where R is the data range.
// Throws ZeroRangeError when R = 0.
Hyperparams default_hyperparams(const Dataset& data);

// Applies `key=value` overrides (keys xi, kappa, alpha, g, h,
// dirichlet_delta). Unknown keys are a ValidationError.
Hyperparams apply_overrides(Hyperparams hyper,
                            const std::map<std::string, double>& overrides);

// One `key=value` line per constant, in declaration order.
std::string format_hyperparams(const Hyperparams& hyper);

// Component labels, zero-based (z[i] in [0, K)).
struct LatentAllocations
{
  std::vector<std::size_t> z;
  std::vector<std::size_t> counts;
};

// log p1(params, beta): Dirichlet + normal + inverse-gamma + gamma terms.
double log_p1(const MixtureParams& params, double beta, const Hyperparams& hyper);

// P(z_i = k) proportional to pi_k N(y_i; mu_k, sigma_k^2).
LatentAllocations sample_allocations(const Dataset& data,
                                     const MixtureParams& params,
                                     Rng& rng);

// Dirichlet(delta + n_1, ..., delta + n_K).
std::vector<double> sample_weights(const LatentAllocations& alloc,
                                   const Hyperparams& hyper,
                                   Rng& rng);

// Independent draws mu_k ~ N(m_k, v_k) with
//   v_k = 1 / (kappa + n_k / sigma_k^2),  m_k = v_k (kappa xi + S_k / sigma_k^2).
// Conditionally on the allocations the K means are independent, so this is
// one exact draw from their joint full conditional.
std::vector<double> sample_means_conditional(const Dataset& data,
                                             const LatentAllocations& alloc,
                                             std::span<const double> variances,
                                             const Hyperparams& hyper,
                                             Rng& rng);

// 1/sigma_k^2 ~ Gamma(alpha + n_k/2, beta + 0.5 * sum_{z_i=k} (y_i - mu_k)^2).
std::vector<double> sample_variances(const Dataset& data,
                                     const LatentAllocations& alloc,
                                     std::span<const double> means,
                                     double beta,
                                     const Hyperparams& hyper,
                                     Rng& rng);

// beta ~ Gamma(g + K alpha, h + sum_k 1/sigma_k^2).
double sample_beta(std::span<const double> variances, const Hyperparams& hyper, Rng& rng);

} // namespace ppp
