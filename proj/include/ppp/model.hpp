#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ppp {

// Component-specific parameter families of a Gaussian mixture.
enum class Block
{
  weights,
  means,
  variances
};

std::string_view to_string(Block block);

// Ordered real observations with a provenance label.
struct Dataset
{
  std::vector<double> observations;
  std::string label;

  std::size_t n() const { return observations.size(); }
  double min() const;
  double max() const;
  double range() const { return max() - min(); }

  // Throws ValidationError unless n >= 1 and every value is finite.
  void validate() const;
};

Dataset make_dataset(std::vector<double> observations, std::string label);

// Parameters of a K-component Gaussian mixture. `globals` holds parameters
// shared by all components; it is empty for the Gaussian model.
struct MixtureParams
{
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
  std::vector<double> globals;

  std::size_t k() const { return means.size(); }

  const std::vector<double>& block(Block b) const;
  std::vector<double>& block(Block b);

  // Throws ValidationError on size mismatch, non-positive weights or
  // variances, or weights not summing to 1 within 1e-12.
  void validate() const;
};

double log_normal_pdf(double y, double mean, double variance);

// log of sum_k pi_k N(y; mu_k, sigma_k^2), via log-sum-exp over components.
double log_mixture_pdf(double y, const MixtureParams& params);

double mixture_pdf(double y, const MixtureParams& params);

// Sum of log_mixture_pdf over observations. Throws DegenerateDensityError if
// a per-point log density is not finite.
double log_likelihood(const Dataset& data, const MixtureParams& params);

// n i.i.d. draws from the mixture; deterministic given seed.
Dataset simulate_data(const MixtureParams& params, std::size_t n, std::uint64_t seed);

// CSV with a single `y` column.
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

// Shortest decimal text that round-trips `value`, never in exponent form.
std::string format_decimal(double value);

} // namespace ppp
