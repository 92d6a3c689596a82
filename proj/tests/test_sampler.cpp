#include "plain_gibbs.hpp"
#include "support.hpp"

#include "ppp/error.hpp"
#include "ppp/sampler.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ppp;

namespace {

Dataset
two_cluster_data()
{
  const MixtureParams truth{ { 0.5, 0.5 }, { 0.0, 2.0 }, { 1.0, 1.0 }, {} };
  return simulate_data(truth, 60, 4242);
}

ChainConfig
small_config(const Dataset& data, const char* penalty = "none")
{
  ChainConfig c;
  c.k = 2;
  c.iterations = 1000;
  c.burn_in = 200;
  c.thin = 4;
  c.seed = 77;
  c.penalty = parse_penalty(penalty);
  c.hyper = default_hyperparams(data);
  return c;
}

} // namespace

TEST_CASE("penalty none reproduces plain Gibbs bit for bit")
{
  const auto data = two_cluster_data();
  for (std::size_t k : { 1u, 2u, 3u }) {
    auto c = small_config(data);
    c.k = k;
    const auto store = run_chain(data, c);
    CHECK(store.acceptance_rate == 1.0);
    CHECK(ppp::test::same_draws(store, ppp::test::plain_gibbs(data, c)));
  }
}

TEST_CASE("record count arithmetic")
{
  const auto data = two_cluster_data();
  auto c = small_config(data);
  CHECK(c.retained() == 200);
  CHECK(run_chain(data, c).draws.size() == 200);
  c.iterations = 1003;
  c.burn_in = 0;
  c.thin = 7;
  const auto store = run_chain(data, c);
  CHECK(store.draws.size() == 143);
  CHECK(store.draws.front().iter == 7);
  CHECK(store.draws.back().iter == 1001);
}

TEST_CASE("config validation")
{
  const auto data = two_cluster_data();
  auto c = small_config(data);
  c.k = 0;
  CHECK_THROWS_AS(run_chain(data, c), ValidationError);
  c = small_config(data);
  c.burn_in = c.iterations;
  CHECK_THROWS_AS(run_chain(data, c), ValidationError);
  c = small_config(data);
  c.thin = 0;
  CHECK_THROWS_AS(run_chain(data, c), ValidationError);
}

TEST_CASE("untargeted blocks are never rejected")
{
  const auto data = two_cluster_data();
  auto c = small_config(data, "absdiff:mu:s=3");
  c.burn_in = 0;
  c.thin = 1;
  const auto store = run_chain(data, c);
  CHECK(store.acceptance_rate < 1.0);
  std::size_t rejected = 0;
  for (std::size_t i = 1; i < store.draws.size(); ++i) {
    // Continuous conditionals: a fresh draw never repeats the previous value.
    CHECK(store.draws[i].variances != store.draws[i - 1].variances);
    CHECK(store.draws[i].weights != store.draws[i - 1].weights);
    CHECK(store.draws[i].beta != store.draws[i - 1].beta);
    if (!store.draws[i].accept_mu) {
      ++rejected;
      CHECK(store.draws[i].means == store.draws[i - 1].means);
    }
  }
  CHECK(rejected > 0);
}

TEST_CASE("no retained draw has zero penalty")
{
  const auto data = two_cluster_data();
  for (const char* text : { "absdiff:mu:s=1", "threshold:mu:delta=0.8", "absdiff:sigma2:s=1",
                            "absdiff:pi:s=1", "product(absdiff:mu:s=1,threshold:sigma2:delta=0.05)" }) {
    CAPTURE(text);
    auto c = small_config(data, text);
    const auto spec = c.penalty;
    const auto store = run_chain(data, c);
    REQUIRE(store.draws.size() == 200);
    for (const auto& d : store.draws) {
      REQUIRE_FALSE(is_zero_penalty(eval_log_penalty(spec, d.params())));
    }
  }
}

TEST_CASE("threshold respected and variance-targeted rejection happens")
{
  const auto data = two_cluster_data();
  auto c = small_config(data, "threshold:mu:delta=1.5");
  for (const auto& d : run_chain(data, c).draws) {
    CHECK(std::abs(d.means[0] - d.means[1]) > 1.5);
  }
  c = small_config(data, "threshold:sigma2:delta=0.3");
  c.burn_in = 0;
  c.thin = 1;
  const auto store = run_chain(data, c);
  bool stuck = false;
  for (std::size_t i = 1; i < store.draws.size(); ++i) {
    stuck = stuck || store.draws[i].variances == store.draws[i - 1].variances;
    CHECK(std::abs(store.draws[i].variances[0] - store.draws[i].variances[1]) > 0.3);
  }
  CHECK(stuck);
}

TEST_CASE("initialization")
{
  const auto data = two_cluster_data();
  auto c = small_config(data, "absdiff:mu:s=1");
  Rng r1(9);
  Rng r2(9);
  const auto a = init_chain(data, c, r1);
  const auto b = init_chain(data, c, r2);
  CHECK(a.params.means == b.params.means);
  CHECK(a.alloc.z == b.alloc.z);
  CHECK(a.params.means[0] < a.params.means[1]);
  CHECK(std::isfinite(a.log_penalty));
  CHECK(a.beta == doctest::Approx(c.hyper.g / c.hyper.h));
  CHECK(a.params.weights[0] == doctest::Approx(0.5));

  c.k = 3;
  c.init = InitStrategy::prior;
  Rng r3(10);
  const auto p = init_chain(data, c, r3);
  CHECK(p.params.k() == 3);
  CHECK_NOTHROW(p.params.validate());

  c = small_config(data, "threshold:mu:delta=1000");
  Rng r4(1);
  CHECK_THROWS_AS(init_chain(data, c, r4), InitializationError);
}

TEST_CASE("determinism and CSV round trip")
{
  const auto data = two_cluster_data();
  const auto c = small_config(data, "absdiff:mu:s=1");
  const auto a = run_chain(data, c);
  const auto b = run_chain(data, c);
  CHECK(ppp::test::same_draws(a, b));
  CHECK(a.acceptance_rate == b.acceptance_rate);

  const auto dir = ppp::test::scratch_dir("sampler_csv");
  write_samples_csv(dir / "a.csv", a);
  write_samples_csv(dir / "b.csv", b);
  CHECK(ppp::test::slurp(dir / "a.csv") == ppp::test::slurp(dir / "b.csv"));
  const auto back = read_samples_csv(dir / "a.csv");
  CHECK(ppp::test::same_draws(a, back));
  CHECK(ppp::test::slurp(dir / "a.csv").rfind("iter,accept_mu,beta,pi_1,pi_2,mu_1,mu_2,sigma2_1,sigma2_2\n", 0) == 0);
}

TEST_CASE("parallel chains are independent and reproducible")
{
  const auto data = two_cluster_data();
  const auto c = small_config(data, "absdiff:mu:s=1");
  const auto a = run_chains(data, c, 3);
  const auto b = run_chains(data, c, 3);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(ppp::test::same_draws(a[i], b[i]));
  }
  CHECK_FALSE(ppp::test::same_draws(a[0], a[1]));
  auto single = c;
  single.seed = derive_seed(c.seed, 1);
  CHECK(ppp::test::same_draws(a[1], run_chain(data, single)));
}
