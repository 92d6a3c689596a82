#include "support.hpp"

#include "ppp/rng.hpp"

#include <doctest.h>

using namespace ppp;

TEST_CASE("rng: same seed, same stream")
{
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.normal() == b.normal());
    CHECK(a.gamma(0.7, 2.0) == b.gamma(0.7, 2.0));
  }
}

TEST_CASE("rng: uniform stays inside the open unit interval")
{
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("rng: normal and gamma moments")
{
  Rng rng(11);
  const int n = 100000;
  std::vector<double> z(n);
  for (double& v : z) {
    v = rng.normal();
  }
  std::string why;
  CHECK_MESSAGE(test::moments_match(test::moments(z), 0.0, 1.0, &why), why);

  for (double shape : { 0.2, 0.9, 2.0, 41.0 }) {
    const double rate = 3.0;
    std::vector<double> g(n);
    for (double& v : g) {
      v = rng.gamma(shape, rate);
    }
    CHECK_MESSAGE(test::moments_match(test::moments(g), shape / rate, shape / (rate * rate), &why),
                  "shape " << shape << ": " << why);
  }
}

TEST_CASE("rng: categorical frequencies")
{
  Rng rng(3);
  const std::vector<double> w{ 1.0, 3.0, 0.0, 6.0 };
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    ++counts[rng.categorical(w)];
  }
  CHECK(counts[2] == 0);
  for (int k : { 0, 1, 3 }) {
    const double p = w[k] / 10.0;
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(counts[k] / double(n) - p) < 4 * se);
  }
}

TEST_CASE("rng: derived seeds differ per stream")
{
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}
