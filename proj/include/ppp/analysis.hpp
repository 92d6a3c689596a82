#pragma once

#include "ppp/model.hpp"
#include "ppp/sampler.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppp {

// `bins` equal cells spanning [min, max].
struct AxisSpec
{
  double min = 0.0;
  double max = 1.0;
  std::size_t bins = 100;

  double width() const { return (max - min) / static_cast<double>(bins); }
  double center(std::size_t i) const { return min + (static_cast<double>(i) + 0.5) * width(); }
  // Cell containing x; nullopt outside [min, max].
  std::optional<std::size_t> locate(double x) const;

  bool operator==(const AxisSpec&) const = default;
};

// Normalised cell masses over a 1-D or 2-D grid. 2-D masses are row-major
// with the first axis varying slowest: mass[i * ny + j].
struct DensityGrid
{
  std::vector<AxisSpec> axes;
  std::vector<double> mass;

  std::size_t dim() const { return axes.size(); }
  double at(std::size_t i) const { return mass[i]; }
  double at(std::size_t i, std::size_t j) const { return mass[i * axes[1].bins + j]; }

  // Rescales masses to sum to 1. Throws GridError if the total is zero.
  void normalize();
};

DensityGrid empty_grid(const AxisSpec& x);
DensityGrid empty_grid(const AxisSpec& x, const AxisSpec& y);

struct RelabeledSamples
{
  SampleStore samples;
  // permutations[d][j] is the original label of relabeled component j.
  std::vector<std::vector<std::size_t>> permutations;
};

// Sorts every draw by its means (stable on ties) and applies the same
// permutation to weights and variances.
RelabeledSamples relabel_ic(const SampleStore& samples);

// Concatenates the K columns of one block, column-major:
// all draws of component 1, then component 2, ...
std::vector<double> pool_generic(const SampleStore& samples, Block block);

// 0.9 * min(sd, IQR / 1.34) * n^(-1/5). Falls back to the sd when the IQR
// vanishes; throws ValidationError when all values are equal.
double silverman_bandwidth(std::span<const double> values);

// [min - 3 sd, max + 3 sd] split into `bins` cells.
AxisSpec default_axis(std::span<const double> values, std::size_t bins);

// default_axis with at least `min_bins` cells, refined until a cell is no
// wider than a quarter of the bandwidth (at most 200000 cells).
AxisSpec kde_axis(std::span<const double> values, double bandwidth, std::size_t min_bins);

// Gaussian-kernel density at each cell centre, renormalised over the cells.
// An empty bandwidth selects silverman_bandwidth.
DensityGrid kde_1d(std::span<const double> values,
                   std::optional<double> bandwidth,
                   const AxisSpec& axis);

DensityGrid histogram_1d(std::span<const double> values, const AxisSpec& axis);

struct Smoothing2d
{
  // Empty entries select silverman_bandwidth of that coordinate.
  std::optional<double> bandwidth_x;
  std::optional<double> bandwidth_y;
};

// Normalised 2-D histogram of (x, y) pairs, or, with smoothing, a product
// Gaussian kernel estimate at the cell centres. Points outside the grid are
// ignored by the histogram.
DensityGrid grid_2d(std::span<const double> xs,
                    std::span<const double> ys,
                    const AxisSpec& x_axis,
                    const AxisSpec& y_axis,
                    std::optional<Smoothing2d> smoothing = std::nullopt);

// Raw columns (iter, accept_mu, beta, pi_j, mu_j, sigma2_j) plus derived
// ones: absdiff_mu = |mu_1 - mu_2|, max_sigma2, gap_mu_<j+1>_<j> (successive
// gaps of the sorted means) and the pooled mu_pooled, sigma2_pooled,
// pi_pooled. Pooled columns have K entries per draw.
std::map<std::string, std::vector<double>> derived_columns(const SampleStore& samples);

// One column by name; throws UnknownColumnError listing what exists.
std::vector<double> column(const SampleStore& samples, std::string_view name);

std::vector<std::string> column_names(std::size_t k);

enum class Comparison
{
  less,
  greater
};

// Fraction of values satisfying `value op threshold`. Throws
// ValidationError on empty input.
double tail_probability(std::span<const double> values, Comparison op, double threshold);

struct TailCondition
{
  std::string column;
  Comparison op = Comparison::less;
  double threshold = 0.0;
};

// Parses `<col><op><thr>` terms joined by '&', e.g. "absdiff_mu<0.5&max_sigma2>2".
std::vector<TailCondition> parse_tail_query(std::string_view text);

// Fraction of draws satisfying every condition.
double joint_tail_probability(const SampleStore& samples,
                              std::span<const TailCondition> conditions);

// Share of the global maximum below which a local maximum is treated as
// kernel noise by the summaries.
inline constexpr double significant_mode_height = 0.05;

// Indices of local maxima of a 1-D grid. A plateau counts once; the end
// cells count when they exceed their single neighbour. Maxima lower than
// `min_relative_height` times the global maximum are dropped.
std::vector<std::size_t> local_maxima(const DensityGrid& grid, double min_relative_height = 0.0);

// `x,mass` or `x,y,mass` at cell centres.
void write_grid_csv(const std::filesystem::path& path, const DensityGrid& grid);

// Standalone SVG: line plot for 1-D, 10-level filled contour for 2-D.
void write_grid_svg(const std::filesystem::path& path,
                    const DensityGrid& grid,
                    std::string_view title);

} // namespace ppp
