#pragma once

// Exact identities of the penalty family.

#include "check_result.hpp"

#include "ppp/error.hpp"
#include "ppp/penalty.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace ppp::test {

inline MixtureParams
with_means(std::vector<double> mu)
{
  const std::size_t k = mu.size();
  return { std::vector<double>(k, 1.0 / static_cast<double>(k)), std::move(mu), std::vector<double>(k, 1.0), {} };
}

inline MixtureParams
with_variances(std::vector<double> s2)
{
  const std::size_t k = s2.size();
  std::vector<double> mu(k);
  for (std::size_t j = 0; j < k; ++j) {
    mu[j] = static_cast<double>(j);
  }
  return { std::vector<double>(k, 1.0 / static_cast<double>(k)), std::move(mu), std::move(s2), {} };
}

inline std::vector<CheckResult>
penalty_algebra_checks()
{
  std::vector<CheckResult> out;
  auto near = [&](std::string name, double got, double want, double tol) {
    std::ostringstream os;
    os.precision(17);
    os << "got " << got << ", want " << want;
    out.push_back({ std::move(name), std::abs(got - want) <= tol, os.str() });
  };
  auto flag = [&](std::string name, bool ok, std::string detail = {}) {
    out.push_back({ std::move(name), ok, std::move(detail) });
  };

  const auto abs1 = parse_penalty("absdiff:mu:s=1");

  // Scale invariance of the acceptance ratio, for several s and a < 0 too.
  {
    bool ok = true;
    double worst = 0.0;
    const std::vector<std::vector<double>> cur{ { 0.0, 2.0 }, { -1.0, 0.3, 2.7 }, { 5.0, 1.0, 1.4, 9.0 } };
    const std::vector<std::vector<double>> prop{ { 0.0, 1.0 }, { -1.0, 0.9, 2.7 }, { 5.0, 1.0, 3.0, 9.5 } };
    for (const char* text : { "absdiff:mu:s=1", "absdiff:mu:s=2.5", "absdiff:mu:s=-1", "maxmin" }) {
      const auto spec = parse_penalty(text);
      for (std::size_t c = 0; c < cur.size(); ++c) {
        const double base = acceptance_probability(spec, with_means(prop[c]), with_means(cur[c]));
        for (double a : { 0.001, 0.37, 3.0, 1e4, -2.0 }) {
          std::vector<double> pa = prop[c];
          std::vector<double> ca = cur[c];
          for (double& v : pa) v *= a;
          for (double& v : ca) v *= a;
          const double scaled = acceptance_probability(spec, with_means(pa), with_means(ca));
          worst = std::max(worst, std::abs(scaled - base));
        }
      }
    }
    ok = worst <= 1e-12;
    flag("scale invariance of the acceptance ratio", ok, "max deviation " + std::to_string(worst));
  }

  // Label permutations leave log p2 unchanged, exactly.
  {
    bool ok = true;
    for (const char* text : { "absdiff:mu:s=1", "absdiff:sigma2:s=-1", "absdiff:pi:s=2", "maxmin",
                              "threshold:mu:delta=0.5" }) {
      const auto spec = parse_penalty(text);
      const MixtureParams a{ { 0.2, 0.5, 0.3 }, { -1.0, 0.0, 2.0 }, { 1.0, 0.5, 3.0 }, {} };
      const MixtureParams b{ { 0.3, 0.2, 0.5 }, { 2.0, -1.0, 0.0 }, { 3.0, 1.0, 0.5 }, {} };
      ok = ok && eval_log_penalty(spec, a) == eval_log_penalty(spec, b);
    }
    flag("label permutation invariance", ok);
  }

  near("s=1 on mu=(0,2) is log 2", eval_log_penalty(abs1, with_means({ 0.0, 2.0 })), std::log(2.0), 1e-15);
  near("s=1 on mu=(0,1,3) is 0", eval_log_penalty(abs1, with_means({ 0.0, 1.0, 3.0 })), 0.0, 0.0);
  {
    const auto s0 = parse_penalty("absdiff:mu:s=0");
    bool ok = true;
    for (const auto& mu : std::vector<std::vector<double>>{ { 0.0, 2.0 }, { 1.0, 1.0 }, { -3.0, 0.1, 7.0 } }) {
      ok = ok && eval_log_penalty(s0, with_means(mu)) == 0.0;
    }
    flag("s=0 gives log p2 = 0 everywhere", ok);
  }
  {
    const MixtureParams p{ { 0.1, 0.2, 0.7 }, { -0.4, 0.35, 2.2 }, { 0.3, 1.9, 0.8 }, {} };
    double worst = 0.0;
    for (auto [a, b] : std::vector<std::pair<double, double>>{ { 1, 2 }, { 0.5, -1.5 }, { -1, 3 } }) {
      for (const char* t : { "mu", "sigma2", "pi" }) {
        const std::string base = std::string("absdiff:") + t + ":s=";
        std::ostringstream pa;
        std::ostringstream pb;
        std::ostringstream pab;
        pa << base << a;
        pb << base << b;
        pab << base << (a + b);
        const auto prod = parse_penalty("product(" + pa.str() + "," + pb.str() + ")");
        worst = std::max(worst, std::abs(eval_log_penalty(prod, p) - eval_log_penalty(parse_penalty(pab.str()), p)));
      }
    }
    flag("s-additivity through product", worst <= 1e-12, "max deviation " + std::to_string(worst));
  }
  near("absdiff:sigma2:s=-1 on (1,1.5,4) is log 2",
       eval_log_penalty(parse_penalty("absdiff:sigma2:s=-1"), with_variances({ 1.0, 1.5, 4.0 })),
       std::log(2.0),
       1e-15);
  near("maxmin on [[1,1],[0,3]] is log 3",
       eval_log_penalty(parse_penalty("maxmin"), CoefficientMatrix{ 2, 2, { 1.0, 1.0, 0.0, 3.0 } }),
       std::log(3.0),
       1e-15);
  {
    const auto th = parse_penalty("threshold:mu:delta=1");
    const double inside = eval_log_penalty(th, with_means({ 0.0, 0.5 }));
    const double outside = eval_log_penalty(th, with_means({ 0.0, 1.5 }));
    flag("threshold gives -inf inside delta and 0 outside", is_zero_penalty(inside) && outside == 0.0);
    // Larger delta never revives a zero-penalty state.
    bool mono = true;
    for (double gap : { 0.1, 0.5, 0.99, 1.0, 2.0, 4.0 }) {
      bool was_zero = false;
      for (double delta : { 0.05, 0.5, 1.0, 1.5, 3.0, 10.0 }) {
        std::ostringstream os;
        os << "threshold:mu:delta=" << delta;
        const bool zero = is_zero_penalty(eval_log_penalty(parse_penalty(os.str()), with_means({ 0.0, gap })));
        mono = mono && !(was_zero && !zero);
        was_zero = zero;
      }
    }
    flag("threshold monotone in delta", mono);
    flag("zero-penalty proposal is rejected",
         acceptance_probability(th, with_means({ 0.0, 0.5 }), with_means({ 0.0, 2.0 })) == 0.0);
    bool threw = false;
    try {
      acceptance_probability(th, with_means({ 0.0, 2.0 }), with_means({ 0.0, 0.5 }));
    } catch (const InvalidStateError&) {
      threw = true;
    }
    flag("zero-penalty current state is an error", threw);
  }
  flag("coincident means with s>0 are -inf",
       is_zero_penalty(eval_log_penalty(abs1, with_means({ 1.0, 1.0 }))));
  return out;
}

} // namespace ppp::test
