#include "ppp/analysis.hpp"

#include "ppp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

namespace ppp {

namespace {

constexpr double kernel_cutoff = 8.0; // in bandwidths

double
quantile_sorted(const std::vector<double>& sorted, double p)
{
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double
standard_deviation(std::span<const double> values)
{
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  return std::sqrt(ss / (n - 1.0));
}

// Unnormalised kernel weights of every value over one axis, accumulated into
// a row per value only within the cutoff window.
template<class Fn>
void
for_each_kernel_cell(double value, double bandwidth, const AxisSpec& axis, Fn&& fn)
{
  const double w = axis.width();
  const double lo = value - kernel_cutoff * bandwidth;
  const double hi = value + kernel_cutoff * bandwidth;
  const double first = std::floor((lo - axis.min) / w);
  const double last = std::ceil((hi - axis.min) / w);
  const auto i0 = static_cast<std::size_t>(std::max(0.0, first));
  const auto i1 = static_cast<std::size_t>(
    std::min(static_cast<double>(axis.bins), std::max(0.0, last + 1.0)));
  for (std::size_t i = i0; i < i1; ++i) {
    const double u = (axis.center(i) - value) / bandwidth;
    fn(i, std::exp(-0.5 * u * u));
  }
}

void
require_values(std::span<const double> values, std::size_t at_least, const char* what)
{
  if (values.size() < at_least) {
    throw ValidationError(std::string(what) + ": needs at least " +
                          std::to_string(at_least) + " values");
  }
}

} // namespace

std::optional<std::size_t>
AxisSpec::locate(double x) const
{
  if (!(x >= min && x <= max)) {
    return std::nullopt;
  }
  const auto i = static_cast<std::size_t>((x - min) / width());
  return std::min(i, bins - 1);
}

void
DensityGrid::normalize()
{
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw GridError("grid has no mass to normalise");
  }
  for (double& m : mass) {
    m /= total;
  }
}

DensityGrid
empty_grid(const AxisSpec& x)
{
  return { { x }, std::vector<double>(x.bins, 0.0) };
}

DensityGrid
empty_grid(const AxisSpec& x, const AxisSpec& y)
{
  return { { x, y }, std::vector<double>(x.bins * y.bins, 0.0) };
}

RelabeledSamples
relabel_ic(const SampleStore& samples)
{
  RelabeledSamples out;
  out.samples = samples;
  out.permutations.reserve(samples.draws.size());
  for (auto& d : out.samples.draws) {
    std::vector<std::size_t> perm(d.means.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      return d.means[a] < d.means[b];
    });
    auto apply = [&](std::vector<double>& v) {
      std::vector<double> sorted(v.size());
      for (std::size_t j = 0; j < v.size(); ++j) {
        sorted[j] = v[perm[j]];
      }
      v = std::move(sorted);
    };
    apply(d.means);
    apply(d.weights);
    apply(d.variances);
    out.permutations.push_back(std::move(perm));
  }
  return out;
}

std::vector<double>
pool_generic(const SampleStore& samples, Block block)
{
  std::vector<double> pooled;
  pooled.reserve(samples.k * samples.draws.size());
  for (std::size_t j = 0; j < samples.k; ++j) {
    for (const auto& d : samples.draws) {
      pooled.push_back(d.block(block)[j]);
    }
  }
  return pooled;
}

double
silverman_bandwidth(std::span<const double> values)
{
  require_values(values, 2, "bandwidth");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw ValidationError("bandwidth: all values are equal");
  }
  const double sd = standard_deviation(values);
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

AxisSpec
default_axis(std::span<const double> values, std::size_t bins)
{
  require_values(values, 2, "axis");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double sd = standard_deviation(values);
  return { *lo - 3.0 * sd, *hi + 3.0 * sd, bins };
}

AxisSpec
kde_axis(std::span<const double> values, double bandwidth, std::size_t min_bins)
{
  AxisSpec axis = default_axis(values, min_bins);
  if (!(bandwidth > 0.0)) {
    throw ValidationError("kde: bandwidth must be positive");
  }
  const double wanted = std::ceil(4.0 * (axis.max - axis.min) / bandwidth);
  axis.bins = std::max(min_bins, static_cast<std::size_t>(std::min(wanted, 200000.0)));
  return axis;
}

DensityGrid
kde_1d(std::span<const double> values, std::optional<double> bandwidth, const AxisSpec& axis)
{
  require_values(values, 2, "kde");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ValidationError("kde: bandwidth must be positive");
  }
  {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) {
      throw ValidationError("kde: all values are equal");
    }
  }
  DensityGrid grid = empty_grid(axis);
  for (double v : values) {
    for_each_kernel_cell(v, h, axis, [&](std::size_t i, double k) { grid.mass[i] += k; });
  }
  grid.normalize();
  return grid;
}

DensityGrid
histogram_1d(std::span<const double> values, const AxisSpec& axis)
{
  DensityGrid grid = empty_grid(axis);
  for (double v : values) {
    if (auto i = axis.locate(v)) {
      grid.mass[*i] += 1.0;
    }
  }
  grid.normalize();
  return grid;
}

DensityGrid
grid_2d(std::span<const double> xs,
        std::span<const double> ys,
        const AxisSpec& x_axis,
        const AxisSpec& y_axis,
        std::optional<Smoothing2d> smoothing)
{
  if (xs.size() != ys.size()) {
    throw ValidationError("grid_2d: x and y have different lengths (" +
                          std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) +
                          ")");
  }
  DensityGrid grid = empty_grid(x_axis, y_axis);
  const std::size_t ny = y_axis.bins;
  if (!smoothing) {
    for (std::size_t p = 0; p < xs.size(); ++p) {
      const auto i = x_axis.locate(xs[p]);
      const auto j = y_axis.locate(ys[p]);
      if (i && j) {
        grid.mass[*i * ny + *j] += 1.0;
      }
    }
    grid.normalize();
    return grid;
  }
  const double hx = smoothing->bandwidth_x ? *smoothing->bandwidth_x : silverman_bandwidth(xs);
  const double hy = smoothing->bandwidth_y ? *smoothing->bandwidth_y : silverman_bandwidth(ys);
  if (!(hx > 0.0) || !(hy > 0.0)) {
    throw ValidationError("grid_2d: bandwidths must be positive");
  }
  std::vector<std::pair<std::size_t, double>> wx;
  std::vector<std::pair<std::size_t, double>> wy;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    wx.clear();
    wy.clear();
    for_each_kernel_cell(xs[p], hx, x_axis, [&](std::size_t i, double k) { wx.emplace_back(i, k); });
    for_each_kernel_cell(ys[p], hy, y_axis, [&](std::size_t j, double k) { wy.emplace_back(j, k); });
    for (const auto& [i, kx] : wx) {
      double* row = grid.mass.data() + i * ny;
      for (const auto& [j, ky] : wy) {
        row[j] += kx * ky;
      }
    }
  }
  grid.normalize();
  return grid;
}

std::vector<std::string>
column_names(std::size_t k)
{
  std::vector<std::string> names{ "iter", "accept_mu", "beta" };
  for (const char* block : { "pi", "mu", "sigma2" }) {
    for (std::size_t j = 1; j <= k; ++j) {
      names.push_back(std::string(block) + "_" + std::to_string(j));
    }
  }
  if (k >= 2) {
    names.emplace_back("absdiff_mu");
  }
  names.emplace_back("max_sigma2");
  for (std::size_t j = 1; j < k; ++j) {
    names.push_back("gap_mu_" + std::to_string(j + 1) + "_" + std::to_string(j));
  }
  names.emplace_back("mu_pooled");
  names.emplace_back("sigma2_pooled");
  names.emplace_back("pi_pooled");
  return names;
}

std::map<std::string, std::vector<double>>
derived_columns(const SampleStore& samples)
{
  std::map<std::string, std::vector<double>> cols;
  for (const auto& name : column_names(samples.k)) {
    cols.emplace(name, column(samples, name));
  }
  return cols;
}

std::vector<double>
column(const SampleStore& samples, std::string_view name)
{
  const std::size_t k = samples.k;
  const auto& draws = samples.draws;
  std::vector<double> out;
  out.reserve(draws.size());
  auto per_draw = [&](auto&& fn) {
    for (const auto& d : draws) {
      out.push_back(fn(d));
    }
    return out;
  };

  if (name == "iter") {
    return per_draw([](const DrawRecord& d) { return static_cast<double>(d.iter); });
  }
  if (name == "accept_mu") {
    return per_draw([](const DrawRecord& d) { return d.accept_mu ? 1.0 : 0.0; });
  }
  if (name == "beta") {
    return per_draw([](const DrawRecord& d) { return d.beta; });
  }
  if (name == "absdiff_mu" && k >= 2) {
    return per_draw([](const DrawRecord& d) { return std::abs(d.means[0] - d.means[1]); });
  }
  if (name == "max_sigma2") {
    return per_draw([](const DrawRecord& d) {
      return *std::max_element(d.variances.begin(), d.variances.end());
    });
  }
  if (name == "mu_pooled") {
    return pool_generic(samples, Block::means);
  }
  if (name == "sigma2_pooled") {
    return pool_generic(samples, Block::variances);
  }
  if (name == "pi_pooled") {
    return pool_generic(samples, Block::weights);
  }

  auto index_after = [&](std::string_view prefix) -> std::optional<std::size_t> {
    if (!name.starts_with(prefix)) {
      return std::nullopt;
    }
    const auto rest = name.substr(prefix.size());
    std::size_t j = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), j);
    if (ec != std::errc() || ptr != rest.data() + rest.size() || j < 1 || j > k) {
      return std::nullopt;
    }
    return j - 1;
  };

  if (name.starts_with("gap_mu_")) {
    // gap_mu_<j+1>_<j>
    const auto rest = name.substr(7);
    const auto sep = rest.find('_');
    std::size_t upper = 0;
    std::size_t lower = 0;
    if (sep != std::string_view::npos) {
      auto a = std::from_chars(rest.data(), rest.data() + sep, upper);
      auto b = std::from_chars(rest.data() + sep + 1, rest.data() + rest.size(), lower);
      if (a.ec == std::errc() && a.ptr == rest.data() + sep && b.ec == std::errc() &&
          b.ptr == rest.data() + rest.size() && lower >= 1 && upper == lower + 1 &&
          upper <= k) {
        return per_draw([&](const DrawRecord& d) {
          std::vector<double> sorted = d.means;
          std::sort(sorted.begin(), sorted.end());
          return sorted[upper - 1] - sorted[lower - 1];
        });
      }
    }
  }
  for (auto [prefix, block] : { std::pair{ "pi_", Block::weights },
                                std::pair{ "mu_", Block::means },
                                std::pair{ "sigma2_", Block::variances } }) {
    if (auto j = index_after(prefix)) {
      return per_draw([&](const DrawRecord& d) { return d.block(block)[*j]; });
    }
  }

  std::string known;
  for (const auto& n : column_names(k)) {
    known += (known.empty() ? "" : ", ") + n;
  }
  throw UnknownColumnError("unknown column '" + std::string(name) + "' for K=" +
                           std::to_string(k) + "; available: " + known);
}

double
tail_probability(std::span<const double> values, Comparison op, double threshold)
{
  if (values.empty()) {
    throw ValidationError("tail probability of an empty sample");
  }
  std::size_t hits = 0;
  for (double v : values) {
    hits += (op == Comparison::less ? v < threshold : v > threshold) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

std::vector<TailCondition>
parse_tail_query(std::string_view text)
{
  std::vector<TailCondition> conditions;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t amp = text.find('&', start);
    const auto term =
      text.substr(start, amp == std::string_view::npos ? std::string_view::npos : amp - start);
    const std::size_t pos = term.find_first_of("<>");
    if (pos == std::string_view::npos || pos == 0) {
      throw ParseError("tail query term '" + std::string(term) +
                       "' is not of the form <column><'<'|'>'><threshold>");
    }
    TailCondition c;
    c.column = std::string(term.substr(0, pos));
    c.op = term[pos] == '<' ? Comparison::less : Comparison::greater;
    const auto num = term.substr(pos + 1);
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c.threshold);
    if (num.empty() || ec != std::errc() || ptr != num.data() + num.size()) {
      throw ParseError("tail query threshold '" + std::string(num) + "' is not a number");
    }
    conditions.push_back(std::move(c));
    if (amp == std::string_view::npos) {
      break;
    }
    start = amp + 1;
  }
  return conditions;
}

double
joint_tail_probability(const SampleStore& samples, std::span<const TailCondition> conditions)
{
  if (conditions.empty()) {
    throw ValidationError("tail query has no conditions");
  }
  std::vector<std::vector<double>> cols;
  for (const auto& c : conditions) {
    cols.push_back(column(samples, c.column));
    if (cols.back().size() != cols.front().size()) {
      throw ValidationError("tail query mixes per-draw and pooled columns");
    }
  }
  const std::size_t n = cols.front().size();
  if (n == 0) {
    throw ValidationError("tail probability of an empty sample");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool all = true;
    for (std::size_t c = 0; c < conditions.size() && all; ++c) {
      const double v = cols[c][i];
      all = conditions[c].op == Comparison::less ? v < conditions[c].threshold
                                                 : v > conditions[c].threshold;
    }
    hits += all ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

std::vector<std::size_t>
local_maxima(const DensityGrid& grid, double min_relative_height)
{
  if (grid.dim() != 1) {
    throw GridError("local_maxima expects a 1-D grid");
  }
  const auto& m = grid.mass;
  const double floor = min_relative_height * *std::max_element(m.begin(), m.end());
  std::vector<std::size_t> peaks;
  std::size_t i = 0;
  while (i < m.size()) {
    // Extent of the plateau starting at i.
    std::size_t j = i;
    while (j + 1 < m.size() && m[j + 1] == m[i]) {
      ++j;
    }
    const bool left_lower = i == 0 || m[i - 1] < m[i];
    const bool right_lower = j + 1 == m.size() || m[j + 1] < m[i];
    const bool flat_everywhere = i == 0 && j + 1 == m.size();
    if (left_lower && right_lower && !flat_everywhere && m[i] > 0.0 && m[i] >= floor) {
      peaks.push_back((i + j) / 2);
    }
    i = j + 1;
  }
  return peaks;
}

void
write_grid_csv(const std::filesystem::path& path, const DensityGrid& grid)
{
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  if (grid.dim() == 1) {
    out << "x,mass\n";
    for (std::size_t i = 0; i < grid.axes[0].bins; ++i) {
      out << format_decimal(grid.axes[0].center(i)) << ',' << format_decimal(grid.at(i))
          << '\n';
    }
    return;
  }
  out << "x,y,mass\n";
  for (std::size_t i = 0; i < grid.axes[0].bins; ++i) {
    for (std::size_t j = 0; j < grid.axes[1].bins; ++j) {
      out << format_decimal(grid.axes[0].center(i)) << ','
          << format_decimal(grid.axes[1].center(j)) << ',' << format_decimal(grid.at(i, j))
          << '\n';
    }
  }
}

void
write_grid_svg(const std::filesystem::path& path,
               const DensityGrid& grid,
               std::string_view title)
{
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  constexpr double width = 640.0;
  constexpr double height = 480.0;
  constexpr double margin = 50.0;
  const double plot_w = width - 2.0 * margin;
  const double plot_h = height - 2.0 * margin;
  const double top = *std::max_element(grid.mass.begin(), grid.mass.end());

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"25\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

  const AxisSpec& xa = grid.axes[0];
  if (grid.dim() == 1) {
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xa.bins; ++i) {
      const double x = margin + plot_w * (static_cast<double>(i) + 0.5) /
                                  static_cast<double>(xa.bins);
      const double y = margin + plot_h * (1.0 - grid.at(i) / top);
      out << x << ',' << y << ' ';
    }
    out << "\"/>\n";
  } else {
    const AxisSpec& ya = grid.axes[1];
    const double cw = plot_w / static_cast<double>(xa.bins);
    const double ch = plot_h / static_cast<double>(ya.bins);
    for (std::size_t i = 0; i < xa.bins; ++i) {
      for (std::size_t j = 0; j < ya.bins; ++j) {
        // Cell shaded by which of 10 evenly spaced levels it reaches.
        const int level = static_cast<int>(std::floor(10.0 * grid.at(i, j) / top));
        if (level == 0) {
          continue;
        }
        const int shade = 255 - std::min(level, 10) * 22;
        out << "<rect x=\"" << margin + cw * static_cast<double>(i) << "\" y=\""
            << margin + plot_h - ch * static_cast<double>(j + 1) << "\" width=\"" << cw
            << "\" height=\"" << ch << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\"/>\n";
      }
    }
  }
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << margin << "\" y=\"" << height - 20 << "\" font-size=\"11\">"
      << format_decimal(xa.min) << "</text>\n"
      << "<text x=\"" << width - margin << "\" y=\"" << height - 20
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_decimal(xa.max) << "</text>\n"
      << "</svg>\n";
}

} // namespace ppp
