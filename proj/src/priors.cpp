#include "ppp/priors.hpp"

#include "ppp/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ppp {

void
Hyperparams::validate() const
{
  if (!std::isfinite(xi)) {
    throw ValidationError("hyperparameter xi must be finite");
  }
  const std::pair<const char*, double> positive[] = {
    { "kappa", kappa }, { "alpha", alpha }, { "g", g },
    { "h", h },         { "dirichlet_delta", dirichlet_delta },
  };
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ValidationError(std::string("hyperparameter ") + name +
                            " must be positive and finite");
    }
  }
}

Hyperparams
default_hyperparams(const Dataset& data)
{
  data.validate();
  const double lo = data.min();
  const double hi = data.max();
  const double range = hi - lo;
  if (!(range > 0.0)) {
    throw ZeroRangeError("data range is zero; empirical Bayes defaults undefined");
  }
  Hyperparams hyper;
  hyper.xi = 0.5 * (lo + hi);
  hyper.kappa = 1.0 / (range * range);
  hyper.alpha = 2.0;
  hyper.g = 0.2;
  hyper.h = 10.0 / (range * range);
  hyper.dirichlet_delta = 1.0;
  return hyper;
}

Hyperparams
apply_overrides(Hyperparams hyper, const std::map<std::string, double>& overrides)
{
  for (const auto& [key, value] : overrides) {
    if (key == "xi") {
      hyper.xi = value;
    } else if (key == "kappa") {
      hyper.kappa = value;
    } else if (key == "alpha") {
      hyper.alpha = value;
    } else if (key == "g") {
      hyper.g = value;
    } else if (key == "h") {
      hyper.h = value;
    } else if (key == "dirichlet_delta") {
      hyper.dirichlet_delta = value;
    } else {
      throw ValidationError("unknown hyperparameter '" + key + "'");
    }
  }
  hyper.validate();
  return hyper;
}

std::string
format_hyperparams(const Hyperparams& hyper)
{
  std::ostringstream os;
  os << "xi=" << format_decimal(hyper.xi) << '\n'
     << "kappa=" << format_decimal(hyper.kappa) << '\n'
     << "alpha=" << format_decimal(hyper.alpha) << '\n'
     << "g=" << format_decimal(hyper.g) << '\n'
     << "h=" << format_decimal(hyper.h) << '\n'
     << "dirichlet_delta=" << format_decimal(hyper.dirichlet_delta) << '\n';
  return os.str();
}

double
log_p1(const MixtureParams& params, double beta, const Hyperparams& hyper)
{
  const std::size_t k = params.k();
  const double kd = static_cast<double>(k);
  const double delta = hyper.dirichlet_delta;

  double lp = std::lgamma(kd * delta) - kd * std::lgamma(delta);
  for (double w : params.weights) {
    lp += (delta - 1.0) * std::log(w);
  }

  const double log_norm_mu = 0.5 * std::log(hyper.kappa / (2.0 * std::numbers::pi));
  for (double mu : params.means) {
    const double d = mu - hyper.xi;
    lp += log_norm_mu - 0.5 * hyper.kappa * d * d;
  }

  // Inverse-gamma(alpha, beta) density of each sigma_k^2.
  const double log_norm_var = hyper.alpha * std::log(beta) - std::lgamma(hyper.alpha);
  for (double v : params.variances) {
    lp += log_norm_var - (hyper.alpha + 1.0) * std::log(v) - beta / v;
  }

  lp += hyper.g * std::log(hyper.h) - std::lgamma(hyper.g) +
        (hyper.g - 1.0) * std::log(beta) - hyper.h * beta;
  return lp;
}

LatentAllocations
sample_allocations(const Dataset& data, const MixtureParams& params, Rng& rng)
{
  const std::size_t k = params.k();
  LatentAllocations alloc;
  alloc.z.resize(data.n());
  alloc.counts.assign(k, 0);

  std::vector<double> log_w(k);
  std::vector<double> prob(k);
  for (std::size_t j = 0; j < k; ++j) {
    log_w[j] = std::log(params.weights[j]);
  }
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double y = data.observations[i];
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      prob[j] = log_w[j] + log_normal_pdf(y, params.means[j], params.variances[j]);
      top = std::max(top, prob[j]);
    }
    for (double& p : prob) {
      p = std::exp(p - top);
    }
    const std::size_t j = rng.categorical(prob);
    alloc.z[i] = j;
    ++alloc.counts[j];
  }
  return alloc;
}

std::vector<double>
sample_weights(const LatentAllocations& alloc, const Hyperparams& hyper, Rng& rng)
{
  std::vector<double> conc(alloc.counts.size());
  for (std::size_t j = 0; j < conc.size(); ++j) {
    conc[j] = hyper.dirichlet_delta + static_cast<double>(alloc.counts[j]);
  }
  return rng.dirichlet(conc);
}

std::vector<double>
sample_means_conditional(const Dataset& data,
                         const LatentAllocations& alloc,
                         std::span<const double> variances,
                         const Hyperparams& hyper,
                         Rng& rng)
{
  const std::size_t k = variances.size();
  std::vector<double> sums(k, 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    sums[alloc.z[i]] += data.observations[i];
  }
  std::vector<double> means(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double precision =
      hyper.kappa + static_cast<double>(alloc.counts[j]) / variances[j];
    const double v = 1.0 / precision;
    const double m = v * (hyper.kappa * hyper.xi + sums[j] / variances[j]);
    means[j] = rng.normal(m, std::sqrt(v));
  }
  return means;
}

std::vector<double>
sample_variances(const Dataset& data,
                 const LatentAllocations& alloc,
                 std::span<const double> means,
                 double beta,
                 const Hyperparams& hyper,
                 Rng& rng)
{
  const std::size_t k = means.size();
  std::vector<double> ss(k, 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double d = data.observations[i] - means[alloc.z[i]];
    ss[alloc.z[i]] += d * d;
  }
  std::vector<double> variances(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double shape = hyper.alpha + 0.5 * static_cast<double>(alloc.counts[j]);
    const double rate = beta + 0.5 * ss[j];
    variances[j] = 1.0 / rng.gamma(shape, rate);
  }
  return variances;
}

double
sample_beta(std::span<const double> variances, const Hyperparams& hyper, Rng& rng)
{
  double precision_sum = 0.0;
  for (double v : variances) {
    precision_sum += 1.0 / v;
  }
  const double shape = hyper.g + static_cast<double>(variances.size()) * hyper.alpha;
  return rng.gamma(shape, hyper.h + precision_sum);
}

} // namespace ppp
