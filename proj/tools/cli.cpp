#include "cli.hpp"

#include "ppp/analysis.hpp"
#include "ppp/error.hpp"
#include "ppp/model.hpp"
#include "ppp/oracle.hpp"
#include "ppp/penalty.hpp"
#include "ppp/priors.hpp"
#include "ppp/sampler.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace ppp::cli {

namespace {

// Exceeded TV budget; maps to exit_budget.
struct BudgetViolation
{};

struct HyperFlags
{
  std::map<std::string, double> overrides;

  void attach(CLI::App& app)
  {
    for (const char* key : { "xi", "kappa", "alpha", "g", "h", "dirichlet_delta" }) {
      app
        .add_option_function<double>(
          std::string("--") + key,
          [this, key](double v) { overrides[key] = v; },
          std::string("override the empirical Bayes value of ") + key)
        ->type_name("REAL");
    }
  }

  Hyperparams resolve(const Dataset& data) const
  {
    Hyperparams base;
    try {
      base = default_hyperparams(data);
    } catch (const ZeroRangeError&) {
      // Only fatal if the caller has not pinned the range-dependent constants.
      if (!overrides.contains("xi") || !overrides.contains("kappa") || !overrides.contains("h")) {
        throw;
      }
    }
    return apply_overrides(base, overrides);
  }
};

MixtureParams
params_from_flags(std::size_t k,
                  const std::vector<double>& weights,
                  const std::vector<double>& means,
                  const std::vector<double>& variances)
{
  if (weights.size() != k || means.size() != k || variances.size() != k) {
    throw ValidationError("--weights, --means and --sds/--variances need exactly k=" +
                          std::to_string(k) + " entries each");
  }
  double total = 0.0;
  for (double w : weights) {
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("--weights must sum to 1 (got " + format_decimal(total) + ")");
  }
  MixtureParams params{ weights, means, variances, {} };
  for (double& w : params.weights) {
    w /= total;
  }
  params.validate();
  return params;
}

std::filesystem::path
with_suffix(const std::filesystem::path& prefix, const std::string& suffix)
{
  auto stem = prefix;
  if (stem.extension() == ".csv" || stem.extension() == ".txt") {
    stem.replace_extension();
  }
  return stem.string() + suffix;
}

void
ensure_parent(const std::filesystem::path& path)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
}

void
write_text(const std::filesystem::path& path, const std::string& text)
{
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << text;
}

std::string
sanitize(std::string name)
{
  for (char& c : name) {
    if (c == ':' || c == '<' || c == '>' || c == '&' || c == '/') {
      c = '_';
    }
  }
  return name;
}

// ---- simulate --------------------------------------------------------------

struct SimulateFlags
{
  std::size_t k = 2;
  std::vector<double> means;
  std::vector<double> sds;
  std::vector<double> weights;
  std::size_t n = 100;
  std::uint64_t seed = 1;
  std::string out_path;
};

void
add_simulate(CLI::App& app, SimulateFlags& f)
{
  app.add_option("--k", f.k, "number of components")->required();
  app.add_option("--means", f.means, "component means, comma separated")->delimiter(',')->required();
  app.add_option("--sds", f.sds, "component standard deviations")->delimiter(',')->required();
  app.add_option("--weights", f.weights, "mixing weights, summing to 1")->delimiter(',')->required();
  app.add_option("--n", f.n, "number of observations")->required();
  app.add_option("--seed", f.seed, "random seed")->required();
  app.add_option("--out", f.out_path, "output CSV path")->required();
}

int
cmd_simulate(const SimulateFlags& f, std::ostream& out)
{
  if (f.n < 1) {
    throw ValidationError("--n must be at least 1");
  }
  std::vector<double> variances;
  for (double sd : f.sds) {
    if (!(sd > 0.0)) {
      throw ValidationError("--sds must be positive");
    }
    variances.push_back(sd * sd);
  }
  const MixtureParams params = params_from_flags(f.k, f.weights, f.means, variances);
  const Dataset data = simulate_data(params, f.n, f.seed);
  ensure_parent(f.out_path);
  write_dataset_csv(f.out_path, data);
  out << "wrote " << data.n() << " observations to " << f.out_path << '\n';
  return exit_ok;
}

// ---- fit -------------------------------------------------------------------

struct FitFlags
{
  std::string data_path;
  std::size_t k = 2;
  std::string penalty = "none";
  std::size_t iters = 20000;
  std::size_t burnin = 5000;
  std::size_t thin = 2;
  std::size_t chains = 1;
  std::uint64_t seed = 1;
  std::string init = "quantile";
  std::string out_path;
  HyperFlags hyper;
};

void
add_fit(CLI::App& app, FitFlags& f)
{
  app.add_option("--data", f.data_path, "dataset CSV (header 'y')")->required();
  app.add_option("--k", f.k, "number of components")->required();
  app.add_option("--penalty", f.penalty, "proximity penalty spec")->capture_default_str();
  app.add_option("--iters", f.iters, "sweeps per chain")->capture_default_str();
  app.add_option("--burnin", f.burnin, "sweeps discarded")->capture_default_str();
  app.add_option("--thin", f.thin, "keep every n-th sweep")->capture_default_str();
  app.add_option("--chains", f.chains, "independent chains")->capture_default_str();
  app.add_option("--seed", f.seed, "base random seed")->required();
  app.add_option("--init", f.init, "quantile | prior")
    ->check(CLI::IsMember({ "quantile", "prior" }))
    ->capture_default_str();
  app.add_option("--out", f.out_path, "output prefix")->required();
  f.hyper.attach(app);
}

int
cmd_fit(const FitFlags& f, std::ostream& out)
{
  if (f.chains < 1) {
    throw ValidationError("--chains must be at least 1");
  }
  ChainConfig config;
  config.k = f.k;
  config.iterations = f.iters;
  config.burn_in = f.burnin;
  config.thin = f.thin;
  config.seed = f.seed;
  config.penalty = parse_penalty(f.penalty);
  config.init = f.init == "prior" ? InitStrategy::prior : InitStrategy::quantile;
  const Dataset data = read_dataset_csv(f.data_path);
  config.hyper = f.hyper.resolve(data);
  config.validate();

  const auto started = std::chrono::steady_clock::now();
  const std::vector<SampleStore> stores = run_chains(data, config, f.chains);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

  std::ostringstream report;
  report << "data=" << f.data_path << '\n'
         << "n=" << data.n() << '\n'
         << "k=" << config.k << '\n'
         << "penalty=" << to_string(config.penalty) << '\n'
         << "iterations=" << config.iterations << '\n'
         << "burn_in=" << config.burn_in << '\n'
         << "thin=" << config.thin << '\n'
         << "chains=" << f.chains << '\n'
         << "seed=" << config.seed << '\n'
         << "init=" << f.init << '\n'
         << format_hyperparams(config.hyper);
  for (std::size_t c = 0; c < stores.size(); ++c) {
    const auto path = with_suffix(f.out_path, "_chain" + std::to_string(c + 1) + ".csv");
    ensure_parent(path);
    write_samples_csv(path, stores[c]);
    report << "chain" << c + 1 << "_file=" << path.filename().string() << '\n'
           << "chain" << c + 1 << "_draws=" << stores[c].draws.size() << '\n'
           << "chain" << c + 1 << "_acceptance_rate=" << format_decimal(stores[c].acceptance_rate)
           << '\n';
  }
  write_text(with_suffix(f.out_path, "_report.txt"), report.str());
  out << report.str() << "wall_time_s=" << elapsed.count() << '\n';
  return exit_ok;
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeFlags
{
  std::vector<std::string> samples;
  std::string relabel = "none";
  std::vector<std::string> kde;
  std::vector<std::string> grid2d;
  std::vector<std::string> tailprob;
  std::string bandwidth = "auto";
  std::size_t bins = 200;
  std::size_t bins2d = 50;
  bool smooth2d = false;
  bool svg = false;
  std::string out_prefix;
};

void
add_analyze(CLI::App& app, AnalyzeFlags& f)
{
  app.add_option("--samples", f.samples, "samples CSV files (chains are pooled)")
    ->required()
    ->expected(1, -1);
  app.add_option("--relabel", f.relabel, "none | ic-mu")
    ->check(CLI::IsMember({ "none", "ic-mu" }))
    ->capture_default_str();
  app.add_option("--kde", f.kde, "columns to smooth")->delimiter(',');
  app.add_option("--grid2d", f.grid2d, "<colx>:<coly> pairs");
  app.add_option("--tailprob", f.tailprob, "<col><op><thr>[&...] queries");
  app.add_option("--bandwidth", f.bandwidth, "auto | <real>")->capture_default_str();
  app.add_option("--bins", f.bins, "minimum cells of 1-D grids")->capture_default_str();
  app.add_option("--bins2d", f.bins2d, "cells per axis of 2-D grids")->capture_default_str();
  app.add_flag("--smooth2d", f.smooth2d, "kernel-smooth 2-D grids");
  app.add_flag("--svg", f.svg, "also render SVG plots");
  app.add_option("--out-prefix", f.out_prefix, "output prefix")->required();
}

std::optional<double>
parse_bandwidth(const std::string& text)
{
  if (text == "auto") {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const double h = std::stod(text, &used);
    if (used == text.size() && h > 0.0 && std::isfinite(h)) {
      return h;
    }
  } catch (const std::exception&) {
  }
  throw ValidationError("--bandwidth must be 'auto' or a positive real, got '" + text + "'");
}

std::string
join_modes(const DensityGrid& grid, const std::vector<std::size_t>& peaks)
{
  std::string s;
  for (std::size_t p : peaks) {
    s += (s.empty() ? "" : ",") + format_decimal(grid.axes[0].center(p));
  }
  return s;
}

int
cmd_analyze(const AnalyzeFlags& f, std::ostream& out)
{
  if (f.bins < 2 || f.bins2d < 2) {
    throw ValidationError("--bins and --bins2d must be at least 2");
  }
  const std::optional<double> bandwidth = parse_bandwidth(f.bandwidth);
  SampleStore merged;
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    SampleStore s = read_samples_csv(f.samples[i]);
    if (i == 0) {
      merged.k = s.k;
    } else if (s.k != merged.k) {
      throw ValidationError("samples files disagree on K");
    }
    for (auto& d : s.draws) {
      merged.draws.push_back(std::move(d));
    }
  }
  if (merged.draws.empty()) {
    throw ValidationError("no draws in the samples files");
  }
  if (f.relabel == "ic-mu") {
    merged = relabel_ic(merged).samples;
  }

  // Validate every column before computing anything.
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& spec : f.grid2d) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
      throw ValidationError("--grid2d expects <colx>:<coly>, got '" + spec + "'");
    }
    pairs.emplace_back(spec.substr(0, colon), spec.substr(colon + 1));
  }
  std::vector<std::vector<TailCondition>> queries;
  for (const auto& q : f.tailprob) {
    queries.push_back(parse_tail_query(q));
  }
  {
    std::set<std::string> needed(f.kde.begin(), f.kde.end());
    for (const auto& [x, y] : pairs) {
      needed.insert(x);
      needed.insert(y);
    }
    for (const auto& q : queries) {
      for (const auto& c : q) {
        needed.insert(c.column);
      }
    }
    const auto known = column_names(merged.k);
    for (const auto& name : needed) {
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        column(merged, name); // throws UnknownColumnError with the list
      }
    }
  }

  std::ostringstream summary;
  summary << "draws=" << merged.draws.size() << '\n'
          << "k=" << merged.k << '\n'
          << "relabel=" << f.relabel << '\n';
  const std::filesystem::path prefix = f.out_prefix;
  ensure_parent(prefix.string() + "_x");

  for (const auto& name : f.kde) {
    const auto values = column(merged, name);
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
    const AxisSpec axis = kde_axis(values, h, f.bins);
    const DensityGrid grid = kde_1d(values, h, axis);
    const auto peaks = local_maxima(grid, significant_mode_height);
    const auto raw_peaks = local_maxima(grid);
    const auto path = prefix.string() + "_kde_" + sanitize(name) + ".csv";
    write_grid_csv(path, grid);
    if (f.svg) {
      write_grid_svg(prefix.string() + "_kde_" + sanitize(name) + ".svg", grid, name);
    }
    summary << "kde." << name << ".bandwidth=" << format_decimal(h) << '\n'
            << "kde." << name << ".axis=" << format_decimal(axis.min) << ':'
            << format_decimal(axis.max) << ':' << axis.bins << '\n'
            << "kde." << name << ".modes=" << peaks.size() << '\n'
            << "kde." << name << ".raw_maxima=" << raw_peaks.size() << '\n'
            << "kde." << name << ".mode_locations=" << join_modes(grid, peaks) << '\n';
  }

  for (const auto& [xname, yname] : pairs) {
    const auto xs = column(merged, xname);
    const auto ys = column(merged, yname);
    const AxisSpec xa = default_axis(xs, f.bins2d);
    const AxisSpec ya = default_axis(ys, f.bins2d);
    std::optional<Smoothing2d> smoothing;
    if (f.smooth2d) {
      smoothing = Smoothing2d{ bandwidth, bandwidth };
    }
    const DensityGrid grid = grid_2d(xs, ys, xa, ya, smoothing);
    const std::string tag = sanitize(xname) + "__" + sanitize(yname);
    write_grid_csv(prefix.string() + "_grid2d_" + tag + ".csv", grid);
    if (f.svg) {
      write_grid_svg(prefix.string() + "_grid2d_" + tag + ".svg", grid, xname + " vs " + yname);
    }
    summary << "grid2d." << xname << ':' << yname << ".cells=" << xa.bins << 'x' << ya.bins
            << '\n';
  }

  for (std::size_t q = 0; q < queries.size(); ++q) {
    summary << "tailprob." << f.tailprob[q] << '='
            << format_decimal(joint_tail_probability(merged, queries[q])) << '\n';
  }

  write_text(prefix.string() + "_summary.txt", summary.str());
  out << summary.str();
  return exit_ok;
}

// ---- oracle ----------------------------------------------------------------

struct OracleFlags
{
  std::string data_path;
  std::vector<double> weights{ 0.5, 0.5 };
  std::vector<double> variances{ 1.0, 1.0 };
  double beta = 1.0;
  std::string penalty = "none";
  double grid_min = -3.0;
  double grid_max = 5.0;
  std::size_t bins = 101;
  std::size_t subdivisions = 3;
  std::size_t chain_iters = 2'010'000;
  std::size_t chain_burnin = 10'000;
  std::size_t chain_thin = 1;
  std::size_t rw_steps = 4'000'000;
  double rw_step_size = 1.0;
  std::uint64_t seed = 1;
  double tv_budget = 0.05;
  double pair_budget = 0.07;
  double min_coverage = 0.999;
  std::string out_prefix;
  HyperFlags hyper;
};

void
add_oracle(CLI::App& app, OracleFlags& f)
{
  app.add_option("--data", f.data_path, "dataset CSV, at most 10 rows")->required();
  app.add_option("--weights", f.weights, "fixed weights")->delimiter(',')->capture_default_str();
  app.add_option("--variances", f.variances, "fixed variances")->delimiter(',')->capture_default_str();
  app.add_option("--beta", f.beta, "fixed beta")->capture_default_str();
  app.add_option("--penalty", f.penalty, "proximity penalty spec")->capture_default_str();
  app.add_option("--grid-min", f.grid_min, "lower grid edge")->capture_default_str();
  app.add_option("--grid-max", f.grid_max, "upper grid edge")->capture_default_str();
  app.add_option("--bins", f.bins, "cells per axis")->capture_default_str();
  app.add_option("--subdivisions", f.subdivisions, "quadrature points per cell and axis")
    ->capture_default_str();
  app.add_option("--chain-iters", f.chain_iters, "sampler sweeps")->capture_default_str();
  app.add_option("--chain-burnin", f.chain_burnin, "sampler burn-in")->capture_default_str();
  app.add_option("--chain-thin", f.chain_thin, "sampler thinning")->capture_default_str();
  app.add_option("--rw-steps", f.rw_steps, "random-walk steps")->capture_default_str();
  app.add_option("--rw-step-size", f.rw_step_size, "random-walk step sd")->capture_default_str();
  app.add_option("--seed", f.seed, "random seed")->capture_default_str();
  app.add_option("--tv-budget", f.tv_budget, "max TV to the grid")->capture_default_str();
  app.add_option("--pair-budget", f.pair_budget, "max TV sampler vs walker")->capture_default_str();
  app.add_option("--min-coverage", f.min_coverage, "required grid coverage")->capture_default_str();
  app.add_option("--out-prefix", f.out_prefix, "output prefix")->required();
  f.hyper.attach(app);
}

int
cmd_oracle(const OracleFlags& f, std::ostream& out)
{
  const Dataset data = read_dataset_csv(f.data_path);
  const Hyperparams hyper = f.hyper.resolve(data);
  const PenaltySpec penalty = parse_penalty(f.penalty);
  FixedComponents fixed{ f.weights, f.variances, f.beta };

  OracleSettings settings;
  settings.axis = AxisSpec{ f.grid_min, f.grid_max, f.bins };
  settings.subdivisions = f.subdivisions;
  settings.chain = ConstrainedChainSettings{ f.chain_iters, f.chain_burnin, f.chain_thin, f.seed };
  settings.rw_steps = f.rw_steps;
  settings.rw_step_size = f.rw_step_size;
  settings.rw_seed = derive_seed(f.seed, 1);

  const OracleReport r = run_oracle(data, fixed, hyper, penalty, settings);

  const std::string prefix = f.out_prefix;
  ensure_parent(prefix + "_x");
  write_grid_csv(prefix + "_grid.csv", r.grid.grid);
  write_grid_csv(prefix + "_chain.csv", r.chain);
  write_grid_csv(prefix + "_walker.csv", r.walker);

  const bool chain_ok = r.tv_grid_chain < f.tv_budget;
  const bool walker_ok = r.tv_grid_walker < f.tv_budget;
  const bool pair_ok = r.tv_chain_walker < f.pair_budget;
  const bool coverage_ok = r.coverage >= f.min_coverage;

  std::ostringstream report;
  report << "data=" << f.data_path << '\n'
         << "n=" << data.n() << '\n'
         << "penalty=" << to_string(penalty) << '\n'
         << "grid=" << format_decimal(f.grid_min) << ':' << format_decimal(f.grid_max) << ':'
         << f.bins << '\n'
         << "chain_sweeps=" << f.chain_iters << '\n'
         << "walker_steps=" << f.rw_steps << '\n'
         << format_hyperparams(hyper)
         << "coverage=" << format_decimal(r.coverage) << (coverage_ok ? " ok" : " LOW") << '\n'
         << "tv_grid_chain=" << format_decimal(r.tv_grid_chain) << (chain_ok ? " ok" : " FAIL")
         << '\n'
         << "tv_grid_walker=" << format_decimal(r.tv_grid_walker) << (walker_ok ? " ok" : " FAIL")
         << '\n'
         << "tv_chain_walker=" << format_decimal(r.tv_chain_walker) << (pair_ok ? " ok" : " FAIL")
         << '\n';
  write_text(prefix + "_report.txt", report.str());
  out << report.str();
  if (!chain_ok || !walker_ok || !pair_ok || !coverage_ok) {
    throw BudgetViolation{};
  }
  return exit_ok;
}

} // namespace

std::map<std::string, std::string>
read_config_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open config file " + path.string());
  }
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t row = 0;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      return std::string();
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ParseError(path.string() + ":" + std::to_string(row) + ": expected key=value");
    }
    entries[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return entries;
}

std::vector<std::string>
merge_config(const std::vector<std::string>& args)
{
  std::vector<std::string> explicit_args;
  std::vector<std::string> files;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) {
        throw ValidationError("--config needs a file path");
      }
      files.push_back(args[++i]);
    } else if (args[i].starts_with("--config=")) {
      files.push_back(args[i].substr(9));
    } else {
      explicit_args.push_back(args[i]);
    }
  }
  std::set<std::string> given;
  for (const auto& a : explicit_args) {
    if (a.starts_with("--")) {
      given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                  : a.find('=') - 2));
    }
  }
  std::vector<std::string> merged = explicit_args;
  for (const auto& file : files) {
    for (const auto& [key, value] : read_config_file(file)) {
      if (given.contains(key)) {
        continue;
      }
      given.insert(key);
      merged.push_back("--" + key);
      // Multi-valued entries are whitespace separated, e.g. samples=a.csv b.csv
      std::istringstream parts(value);
      std::string part;
      bool any = false;
      while (parts >> part) {
        merged.push_back(part);
        any = true;
      }
      if (!any) {
        merged.push_back(value);
      }
    }
  }
  return merged;
}

int
run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Proximity penalty priors for Bayesian Gaussian mixtures" };
  app.require_subcommand(1);
  // `-h` would collide with the hyperparameter flag `--h`.
  app.set_help_flag("--help", "print this help message and exit");

  SimulateFlags simulate;
  FitFlags fit;
  AnalyzeFlags analyze;
  OracleFlags oracle;
  add_simulate(*app.add_subcommand("simulate", "draw a dataset from a Gaussian mixture"), simulate);
  add_fit(*app.add_subcommand("fit", "run the penalised Gibbs sampler"), fit);
  add_analyze(*app.add_subcommand("analyze", "post-process samples"), analyze);
  add_oracle(*app.add_subcommand("oracle", "check the sampler against quadrature"), oracle);

  try {
    std::vector<std::string> merged = merge_config(args);
    std::reverse(merged.begin(), merged.end());
    app.parse(merged);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_validation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  }

  try {
    if (app.got_subcommand("simulate")) {
      return cmd_simulate(simulate, out);
    }
    if (app.got_subcommand("fit")) {
      return cmd_fit(fit, out);
    }
    if (app.got_subcommand("analyze")) {
      return cmd_analyze(analyze, out);
    }
    return cmd_oracle(oracle, out);
  } catch (const BudgetViolation&) {
    err << "oracle: TV budget or coverage violated\n";
    return exit_budget;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_runtime;
  }
}

} // namespace ppp::cli
