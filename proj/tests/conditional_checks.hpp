#pragma once

// Monte Carlo checks of every conjugate full conditional against its closed
// form: mean within 4 MC sd, variance within 6 MC sd, 10^5 draws each.

#include "check_result.hpp"
#include "support.hpp"

#include "ppp/model.hpp"
#include "ppp/priors.hpp"
#include "ppp/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace ppp::test {

inline constexpr int conditional_draws = 100000;

struct ConditionalFixture
{
  Dataset data;
  LatentAllocations alloc;
  Hyperparams hyper;
  std::vector<double> means{ -0.5, 1.0, 2.5, 6.0 };
  std::vector<double> variances{ 0.8, 1.5, 0.6, 2.0 };
  double beta = 0.7;
};

inline ConditionalFixture
make_conditional_fixture()
{
  ConditionalFixture f;
  f.data = make_dataset({ -1.2, -0.4, 0.1, 0.3, 0.9, 1.1, 1.4, 1.8, 2.2, 2.6, 2.9, 3.3, 0.5, -0.2 },
                        "conditional fixture");
  f.hyper = default_hyperparams(f.data);
  // Components 0..2 occupied, component 3 empty.
  f.alloc.z = { 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 1, 0 };
  f.alloc.counts = { 5, 5, 4, 0 };
  return f;
}

inline std::vector<CheckResult>
conditional_moment_checks(std::uint64_t seed = 8)
{
  std::vector<CheckResult> out;
  const ConditionalFixture f = make_conditional_fixture();
  const std::size_t k = f.means.size();
  const int n_draws = conditional_draws;
  Rng rng(seed);

  auto record = [&](std::string name, const Moments& m, double mean, double var) {
    CheckResult r;
    r.name = std::move(name);
    r.pass = moments_match(m, mean, var, &r.detail);
    out.push_back(std::move(r));
  };

  // Allocations: indicator frequencies against the exact categorical law.
  {
    const MixtureParams p{ { 0.2, 0.3, 0.4, 0.1 }, f.means, f.variances, {} };
    const Dataset few = make_dataset({ -0.3, 1.7, 4.0 }, "three points");
    std::vector<std::vector<double>> hits(3 * k, std::vector<double>(n_draws, 0.0));
    for (int d = 0; d < n_draws; ++d) {
      const LatentAllocations a = sample_allocations(few, p, rng);
      for (std::size_t i = 0; i < 3; ++i) {
        hits[i * k + a.z[i]][d] = 1.0;
      }
    }
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<double> dens(k);
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double y = few.observations[i];
        dens[j] = p.weights[j] * std::exp(-0.5 * (y - p.means[j]) * (y - p.means[j]) /
                                          p.variances[j]) /
                  std::sqrt(p.variances[j]);
        total += dens[j];
      }
      for (std::size_t j = 0; j < k; ++j) {
        const double prob = dens[j] / total;
        record("allocation y" + std::to_string(i + 1) + "->" + std::to_string(j + 1),
               moments(hits[i * k + j]),
               prob,
               prob * (1.0 - prob));
      }
    }
  }

  // Weights: Dirichlet(delta + n_k) marginals are Beta(a_k, a0 - a_k).
  {
    std::vector<std::vector<double>> w(k, std::vector<double>(n_draws));
    for (int d = 0; d < n_draws; ++d) {
      const auto draw = sample_weights(f.alloc, f.hyper, rng);
      for (std::size_t j = 0; j < k; ++j) {
        w[j][d] = draw[j];
      }
    }
    double a0 = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      a0 += f.hyper.dirichlet_delta + static_cast<double>(f.alloc.counts[j]);
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double a = f.hyper.dirichlet_delta + static_cast<double>(f.alloc.counts[j]);
      record("weights pi_" + std::to_string(j + 1),
             moments(w[j]),
             a / a0,
             a * (a0 - a) / (a0 * a0 * (a0 + 1.0)));
    }
  }

  // Means: N(m_k, v_k).
  {
    std::vector<std::vector<double>> mu(k, std::vector<double>(n_draws));
    for (int d = 0; d < n_draws; ++d) {
      const auto draw = sample_means_conditional(f.data, f.alloc, f.variances, f.hyper, rng);
      for (std::size_t j = 0; j < k; ++j) {
        mu[j][d] = draw[j];
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < f.data.n(); ++i) {
        if (f.alloc.z[i] == j) {
          sum += f.data.observations[i];
        }
      }
      const double nk = static_cast<double>(f.alloc.counts[j]);
      const double v = 1.0 / (f.hyper.kappa + nk / f.variances[j]);
      const double m = v * (f.hyper.kappa * f.hyper.xi + sum / f.variances[j]);
      record("means mu_" + std::to_string(j + 1), moments(mu[j]), m, v);
    }
  }

  // Variances: precisions are Gamma(alpha + n_k/2, beta + SS_k/2); the
  // variances themselves are checked where the fourth moment exists.
  {
    std::vector<std::vector<double>> prec(k, std::vector<double>(n_draws));
    std::vector<std::vector<double>> var(k, std::vector<double>(n_draws));
    for (int d = 0; d < n_draws; ++d) {
      const auto draw = sample_variances(f.data, f.alloc, f.means, f.beta, f.hyper, rng);
      for (std::size_t j = 0; j < k; ++j) {
        var[j][d] = draw[j];
        prec[j][d] = 1.0 / draw[j];
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      double ss = 0.0;
      for (std::size_t i = 0; i < f.data.n(); ++i) {
        if (f.alloc.z[i] == j) {
          ss += (f.data.observations[i] - f.means[j]) * (f.data.observations[i] - f.means[j]);
        }
      }
      const double shape = f.hyper.alpha + 0.5 * static_cast<double>(f.alloc.counts[j]);
      const double rate = f.beta + 0.5 * ss;
      record("precision 1/sigma2_" + std::to_string(j + 1),
             moments(prec[j]),
             shape / rate,
             shape / (rate * rate));
      if (shape > 4.0) {
        record("variance sigma2_" + std::to_string(j + 1),
               moments(var[j]),
               rate / (shape - 1.0),
               rate * rate / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0)));
      }
    }
  }

  // beta: Gamma(g + K alpha, h + sum 1/sigma_k^2).
  {
    std::vector<double> b(n_draws);
    for (double& v : b) {
      v = sample_beta(f.variances, f.hyper, rng);
    }
    double prec_sum = 0.0;
    for (double v : f.variances) {
      prec_sum += 1.0 / v;
    }
    const double shape = f.hyper.g + static_cast<double>(k) * f.hyper.alpha;
    const double rate = f.hyper.h + prec_sum;
    record("beta", moments(b), shape / rate, shape / (rate * rate));
  }
  return out;
}

} // namespace ppp::test
