#include "ppp/model.hpp"

#include "ppp/error.hpp"
#include "ppp/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace ppp {

std::string_view
to_string(Block block)
{
  switch (block) {
    case Block::weights:
      return "pi";
    case Block::means:
      return "mu";
    case Block::variances:
      return "sigma2";
  }
  return "?";
}

double
Dataset::min() const
{
  return *std::min_element(observations.begin(), observations.end());
}

double
Dataset::max() const
{
  return *std::max_element(observations.begin(), observations.end());
}

void
Dataset::validate() const
{
  if (observations.empty()) {
    throw ValidationError("dataset '" + label + "' has no observations");
  }
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (!std::isfinite(observations[i])) {
      throw ValidationError("dataset '" + label + "': observation " +
                            std::to_string(i + 1) + " is not finite");
    }
  }
}

Dataset
make_dataset(std::vector<double> observations, std::string label)
{
  Dataset data{ std::move(observations), std::move(label) };
  data.validate();
  return data;
}

const std::vector<double>&
MixtureParams::block(Block b) const
{
  switch (b) {
    case Block::weights:
      return weights;
    case Block::means:
      return means;
    case Block::variances:
      return variances;
  }
  return means;
}

std::vector<double>&
MixtureParams::block(Block b)
{
  return const_cast<std::vector<double>&>(std::as_const(*this).block(b));
}

void
MixtureParams::validate() const
{
  const std::size_t k = means.size();
  if (k == 0) {
    throw ValidationError("mixture must have at least one component");
  }
  if (weights.size() != k || variances.size() != k) {
    throw ValidationError("weights, means and variances must all have K entries");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) {
      throw ValidationError("weights must be strictly positive");
    }
    if (!(variances[j] > 0.0) || !std::isfinite(variances[j])) {
      throw ValidationError("variances must be strictly positive");
    }
    if (!std::isfinite(means[j])) {
      throw ValidationError("means must be finite");
    }
    total += weights[j];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("weights must sum to 1");
  }
}

double
log_normal_pdf(double y, double mean, double variance)
{
  constexpr double log_2pi = 1.8378770664093454836;
  const double d = y - mean;
  return -0.5 * (log_2pi + std::log(variance) + d * d / variance);
}

double
log_mixture_pdf(double y, const MixtureParams& params)
{
  // Streaming log-sum-exp: `sum` is accumulated relative to the running max.
  double top = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t j = 0; j < params.k(); ++j) {
    const double t = std::log(params.weights[j]) +
                     log_normal_pdf(y, params.means[j], params.variances[j]);
    if (t > top) {
      sum = sum * std::exp(top - t) + 1.0;
      top = t;
    } else {
      sum += std::exp(t - top);
    }
  }
  return top + std::log(sum);
}

double
mixture_pdf(double y, const MixtureParams& params)
{
  return std::exp(log_mixture_pdf(y, params));
}

double
log_likelihood(const Dataset& data, const MixtureParams& params)
{
  double total = 0.0;
  for (double y : data.observations) {
    const double lp = log_mixture_pdf(y, params);
    if (!std::isfinite(lp)) {
      throw DegenerateDensityError("mixture density is degenerate at y = " +
                                   format_decimal(y));
    }
    total += lp;
  }
  return total;
}

Dataset
simulate_data(const MixtureParams& params, std::size_t n, std::uint64_t seed)
{
  params.validate();
  if (n == 0) {
    throw ValidationError("simulate: n must be at least 1");
  }
  Rng rng(seed);
  std::vector<double> ys(n);
  for (double& y : ys) {
    const std::size_t j = rng.categorical(params.weights);
    y = rng.normal(params.means[j], std::sqrt(params.variances[j]));
  }
  return make_dataset(std::move(ys), "simulated seed=" + std::to_string(seed));
}

Dataset
read_dataset_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open dataset file " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != "y") {
    throw ParseError(path.string() + ": expected header 'y', got '" + line + "'");
  }
  std::vector<double> ys;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    double value = 0.0;
    const auto* first = line.data();
    const auto* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(path.string() + ":" + std::to_string(row) +
                       ": not a number: '" + line + "'");
    }
    ys.push_back(value);
  }
  return make_dataset(std::move(ys), path.stem().string());
}

void
write_dataset_csv(const std::filesystem::path& path, const Dataset& data)
{
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << "y\n";
  for (double y : data.observations) {
    out << format_decimal(y) << '\n';
  }
}

std::string
format_decimal(double value)
{
  char buf[512];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc()) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    return os.str();
  }
  return std::string(buf, ptr);
}

} // namespace ppp
