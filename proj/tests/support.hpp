#pragma once

// Helpers shared by the unit and acceptance suites. Everything here is
// computed independently of the library code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace ppp::test {

inline std::filesystem::path
source_dir()
{
  return PPP_SOURCE_DIR;
}

inline std::filesystem::path
scratch_dir(const std::string& name)
{
  auto dir = std::filesystem::temp_directory_path() / ("ppp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string
slurp(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

struct Moments
{
  double mean = 0.0;
  double variance = 0.0;
  // Monte Carlo standard errors of the two estimates.
  double mean_se = 0.0;
  double variance_se = 0.0;
};

// Sample moments plus their standard errors, the latter from the sample
// fourth central moment: se(s^2) ~ sqrt((m4 - s^4) / N).
inline Moments
moments(std::span<const double> xs)
{
  const double n = static_cast<double>(xs.size());
  Moments m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  m.variance = m2 * n / (n - 1.0);
  m.mean_se = std::sqrt(m.variance / n);
  m.variance_se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  return m;
}

// Closed-form target moments checked at 4 MC sd (mean) and 6 MC sd (variance).
inline bool
moments_match(const Moments& m, double mean, double variance, std::string* why = nullptr)
{
  const double zm = std::abs(m.mean - mean) / m.mean_se;
  const double zv = std::abs(m.variance - variance) / m.variance_se;
  if (why) {
    std::ostringstream os;
    os << "mean " << m.mean << " vs " << mean << " (z=" << zm << "), variance " << m.variance
       << " vs " << variance << " (z=" << zv << ")";
    *why = os.str();
  }
  return zm <= 4.0 && zv <= 6.0;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double
ks_statistic(std::vector<double> a, std::vector<double> b)
{
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) {
      ++i;
    }
    while (j < b.size() && b[j] <= x) {
      ++j;
    }
    d = std::max(d,
                 std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                          static_cast<double>(j) / static_cast<double>(b.size())));
  }
  return d;
}

// Critical KS distance at significance 0.001.
inline double
ks_critical(std::size_t n, std::size_t m)
{
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return 1.949 * std::sqrt((nn + mm) / (nn * mm));
}

// Composite Simpson rule on [a, b] with `intervals` (even) panels.
inline double
simpson(const std::function<double(double)>& f, double a, double b, int intervals = 20000)
{
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) {
    s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

} // namespace ppp::test
