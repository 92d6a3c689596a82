#include "ppp/penalty.hpp"

#include "ppp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace ppp {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

double
min_pairwise_gap(std::vector<double> values)
{
  std::sort(values.begin(), values.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < values.size(); ++i) {
    gap = std::min(gap, values[i] - values[i - 1]);
  }
  return gap;
}

double
log_gap_power(double gap, double s)
{
  if (s == 0.0) {
    return 0.0;
  }
  if (gap == 0.0) {
    return s > 0.0 ? zero_penalty : std::numeric_limits<double>::infinity();
  }
  return s * std::log(gap);
}

double
log_threshold(double gap, double delta)
{
  return gap > delta ? 0.0 : zero_penalty;
}

double
log_max_min(const CoefficientMatrix& m)
{
  if (m.cols < 2) {
    return 0.0;
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> row(m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      row[c] = m.at(r, c);
    }
    best = std::max(best, min_pairwise_gap(row));
  }
  return best > 0.0 ? std::log(best) : zero_penalty;
}

// Sum of logs where any zero factor wins over +infinity.
double
accumulate_log(double acc, double term)
{
  if (is_zero_penalty(acc) || is_zero_penalty(term)) {
    return zero_penalty;
  }
  return acc + term;
}

Block
parse_target(std::string_view text)
{
  if (text == "mu") {
    return Block::means;
  }
  if (text == "sigma2") {
    return Block::variances;
  }
  if (text == "pi") {
    return Block::weights;
  }
  throw SelectorError("unknown penalty target '" + std::string(text) +
                      "' (expected mu, sigma2 or pi)");
}

const char* const grammar_hint =
  "expected one of: none | absdiff:<mu|sigma2|pi>:s=<real> | "
  "threshold:<mu|sigma2|pi>:delta=<real> | maxmin | product(<spec>,<spec>,...)";

[[noreturn]] void
fail(std::string_view text, const std::string& why)
{
  throw ParseError("malformed penalty '" + std::string(text) + "': " + why + "; " +
                   grammar_hint);
}

double
parse_real(std::string_view whole, std::string_view text)
{
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    fail(whole, "'" + std::string(text) + "' is not a real number");
  }
  return value;
}

// Splits on top-level commas (outside parentheses).
std::vector<std::string_view>
split_top_level(std::string_view whole, std::string_view text)
{
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      if (--depth < 0) {
        fail(whole, "unbalanced parentheses");
      }
    } else if (text[i] == ',' && depth == 0) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (depth != 0) {
    fail(whole, "unbalanced parentheses");
  }
  parts.push_back(text.substr(start));
  return parts;
}

PenaltySpec
parse_impl(std::string_view whole, std::string_view text)
{
  if (text == "none") {
    return { NoPenalty{} };
  }
  if (text == "maxmin") {
    return { MaxMinMatrix{} };
  }
  if (text.starts_with("product(")) {
    if (!text.ends_with(")")) {
      fail(whole, "product must end with ')'");
    }
    const auto inner = text.substr(8, text.size() - 9);
    Product product;
    for (auto part : split_top_level(whole, inner)) {
      if (part.empty()) {
        fail(whole, "empty product factor");
      }
      product.factors.push_back(parse_impl(whole, part));
    }
    return { std::move(product) };
  }
  const bool is_absdiff = text.starts_with("absdiff:");
  const bool is_threshold = text.starts_with("threshold:");
  if (is_absdiff || is_threshold) {
    const auto rest = text.substr(is_absdiff ? 8 : 10);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      fail(whole, "missing parameter after target");
    }
    const Block target = parse_target(rest.substr(0, colon));
    const auto arg = rest.substr(colon + 1);
    const std::string_view key = is_absdiff ? "s=" : "delta=";
    if (!arg.starts_with(key)) {
      fail(whole, "expected '" + std::string(key) + "<real>'");
    }
    const double value = parse_real(whole, arg.substr(key.size()));
    if (is_absdiff) {
      return { AbsDiffPower{ target, value } };
    }
    PenaltySpec spec{ Threshold{ target, value } };
    spec.validate();
    return spec;
  }
  fail(whole, "unrecognised form");
}

} // namespace

void
PenaltySpec::validate() const
{
  std::visit(overloaded{
               [](const Threshold& t) {
                 if (!(t.delta > 0.0)) {
                   throw ValidationError("threshold delta must be positive");
                 }
               },
               [](const Product& p) {
                 if (p.factors.empty()) {
                   throw ValidationError("product penalty needs at least one factor");
                 }
                 for (const auto& f : p.factors) {
                   f.validate();
                 }
               },
               [](const auto&) {},
             },
             variant);
}

bool
PenaltySpec::targets(Block block) const
{
  return std::visit(overloaded{
                      [](const NoPenalty&) { return false; },
                      [&](const AbsDiffPower& a) { return a.target == block; },
                      [&](const Threshold& t) { return t.target == block; },
                      [&](const MaxMinMatrix&) { return block == Block::means; },
                      [&](const Product& p) {
                        return std::any_of(p.factors.begin(),
                                           p.factors.end(),
                                           [&](const PenaltySpec& f) {
                                             return f.targets(block);
                                           });
                      },
                    },
                    variant);
}

PenaltySpec
parse_penalty(std::string_view text)
{
  std::string compact;
  for (char c : text) {
    if (c != ' ') {
      compact.push_back(c);
    }
  }
  return parse_impl(text, compact);
}

std::string
to_string(const PenaltySpec& spec)
{
  return std::visit(
    overloaded{
      [](const NoPenalty&) -> std::string { return "none"; },
      [](const AbsDiffPower& a) -> std::string {
        return "absdiff:" + std::string(to_string(a.target)) + ":s=" + format_decimal(a.s);
      },
      [](const Threshold& t) -> std::string {
        return "threshold:" + std::string(to_string(t.target)) +
               ":delta=" + format_decimal(t.delta);
      },
      [](const MaxMinMatrix&) -> std::string { return "maxmin"; },
      [](const Product& p) -> std::string {
        std::string out = "product(";
        for (std::size_t i = 0; i < p.factors.size(); ++i) {
          if (i > 0) {
            out += ',';
          }
          out += to_string(p.factors[i]);
        }
        return out + ")";
      },
    },
    spec.variant);
}

double
eval_log_penalty(const PenaltySpec& spec, const MixtureParams& params)
{
  const bool single = params.k() < 2;
  return std::visit(
    overloaded{
      [](const NoPenalty&) { return 0.0; },
      [&](const AbsDiffPower& a) {
        if (single || a.s == 0.0) {
          return 0.0;
        }
        return log_gap_power(min_pairwise_gap(params.block(a.target)), a.s);
      },
      [&](const Threshold& t) {
        if (single) {
          return 0.0;
        }
        return log_threshold(min_pairwise_gap(params.block(t.target)), t.delta);
      },
      [&](const MaxMinMatrix&) {
        return log_max_min(CoefficientMatrix{ 1, params.k(), params.means });
      },
      [&](const Product& p) {
        double acc = 0.0;
        for (const auto& f : p.factors) {
          acc = accumulate_log(acc, eval_log_penalty(f, params));
        }
        return acc;
      },
    },
    spec.variant);
}

double
eval_log_penalty(const PenaltySpec& spec, const CoefficientMatrix& coefficients)
{
  if (coefficients.values.size() != coefficients.rows * coefficients.cols) {
    throw ValidationError("coefficient matrix size does not match its shape");
  }
  return std::visit(
    overloaded{
      [](const NoPenalty&) { return 0.0; },
      [](const AbsDiffPower& a) -> double {
        throw SelectorError("absdiff targets '" + std::string(to_string(a.target)) +
                            "', which a coefficient matrix does not have");
      },
      [](const Threshold& t) -> double {
        throw SelectorError("threshold targets '" + std::string(to_string(t.target)) +
                            "', which a coefficient matrix does not have");
      },
      [&](const MaxMinMatrix&) { return log_max_min(coefficients); },
      [&](const Product& p) {
        double acc = 0.0;
        for (const auto& f : p.factors) {
          acc = accumulate_log(acc, eval_log_penalty(f, coefficients));
        }
        return acc;
      },
    },
    spec.variant);
}

double
acceptance_from_logs(double log_proposed, double log_current)
{
  if (is_zero_penalty(log_current)) {
    throw InvalidStateError("current state has zero prior penalty");
  }
  if (is_zero_penalty(log_proposed)) {
    return 0.0;
  }
  if (log_proposed == std::numeric_limits<double>::infinity()) {
    return 1.0;
  }
  const double diff = log_proposed - log_current;
  return diff >= 0.0 ? 1.0 : std::exp(diff);
}

double
acceptance_probability(const PenaltySpec& spec,
                       const MixtureParams& proposed,
                       const MixtureParams& current)
{
  return acceptance_from_logs(eval_log_penalty(spec, proposed),
                              eval_log_penalty(spec, current));
}

} // namespace ppp
