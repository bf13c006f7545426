#pragma once

// Command-line front end. `run_cli` is the whole program; tools/cwsoc.cpp
// only forwards argv and the standard streams to it.
//
// Exit codes: 0 success (or all checks passed), 1 runtime failure or failed
// checks, 2 usage error.
//
// Option precedence: command-line flags, then `--config PATH` (key=value
// lines, keys are long option names without dashes), then CWSOC_SEED for
// the seed, then built-in defaults.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cwsoc/io.hpp"
#include "cwsoc/limit_law.hpp"
#include "cwsoc/model.hpp"
#include "cwsoc/rng.hpp"
#include "cwsoc/sampler.hpp"
#include "cwsoc/verification.hpp"
#include "cwsoc/version.hpp"

namespace cwsoc::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr const char* kSamplesHeader = "chain,sweep,s,t,s_scaled,t_scaled";
inline constexpr const char* kConvergenceHeader = "n,ks,mean_t_scaled,sd_t_scaled,samples";
inline constexpr const char* kHistogramHeader = "bin_left,bin_right,density_empirical,density_limit";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplerFlags {
  double sigma = 1.0;
  double proposal_scale = 2.38;
  std::uint64_t burn_in = 1000;
  std::uint64_t thin = 10;
  std::uint64_t seed = 1;
  std::size_t chains = 1;
};

inline void add_sampler_flags(CLI::App& cmd, SamplerFlags& f) {
  cmd.add_option("--sigma", f.sigma, "Standard deviation of the base Gaussian")->check(CLI::PositiveNumber);
  cmd.add_option("--proposal-scale", f.proposal_scale, "Random-walk step in units of sigma")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--burn-in", f.burn_in, "Sweeps discarded before recording");
  cmd.add_option("--thin", f.thin, "Sweeps between records")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", f.seed, "Master seed (default: $CWSOC_SEED, else 1)")->envname("CWSOC_SEED");
  cmd.add_option("--chains", f.chains, "Independent chains, one worker each")->check(CLI::PositiveNumber);
}

inline json sampler_json(const SamplerFlags& f) {
  return {{"proposal_scale", f.proposal_scale},
          {"burn_in_sweeps", f.burn_in},
          {"thin_sweeps", f.thin},
          {"seed", f.seed},
          {"chains", f.chains},
          {"stream_rule", "xoshiro256** seeded by stream_seed(seed, id)"}};
}

inline void write_manifest(const fs::path& dir, const std::string& command, json params, json sampler,
                           const std::vector<std::string>& outputs, const std::vector<std::string>& argv) {
  json m;
  m["command"] = command;
  m["params"] = std::move(params);
  m["sampler"] = std::move(sampler);
  m["timestamp"] = io::utc_timestamp();
  m["code_version"] = kVersion;
  m["output_paths"] = outputs;
  m["argv"] = argv;
  io::write_file(dir / "manifest.json", m.dump(2) + "\n");
}

/// Runs `chains` chains in parallel; chain c uses seed stream_seed(seed, c).
/// Results come back in chain order whatever the scheduling.
inline std::vector<std::vector<SampleRecord>> run_chains(const ModelParams& params, const SamplerFlags& f,
                                                         std::uint64_t sweeps, std::uint64_t stream_base = 0) {
  std::vector<std::vector<SampleRecord>> results(f.chains);
  std::vector<std::thread> workers;
  workers.reserve(f.chains);
  for (std::size_t c = 0; c < f.chains; ++c) {
    workers.emplace_back([&, c] {
      SamplerConfig cfg{f.proposal_scale, f.burn_in, f.thin, stream_seed(f.seed, stream_base + c)};
      ChainState chain = init_chain(params, cfg);
      results[c] = run(chain, sweeps);
    });
  }
  for (auto& w : workers) w.join();
  return results;
}

inline std::string samples_csv(const std::vector<std::vector<SampleRecord>>& chains) {
  std::string out = kSamplesHeader;
  out += '\n';
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (const auto& r : chains[c]) {
      out += std::to_string(c);
      out += ',';
      out += std::to_string(r.sweep);
      for (double v : {r.s, r.t, r.s_scaled, r.t_scaled}) {
        out += ',';
        out += io::format_double(v);
      }
      out += '\n';
    }
  }
  return out;
}

// --- config file support ----------------------------------------------------

inline std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config file " + path.string());
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

/// Splices config entries into the argument list after the subcommand name,
/// skipping every key the user already passed on the command line.
inline std::vector<std::string> apply_config(const std::vector<std::string>& args, CLI::App& app) {
  std::vector<std::string> out = args;
  auto it = std::find(args.begin(), args.end(), "--config");
  std::string path;
  std::size_t erase_at = args.size();
  if (it != args.end()) {
    if (std::next(it) == args.end()) throw UsageError("--config requires a path");
    path = *std::next(it);
    erase_at = static_cast<std::size_t>(it - args.begin());
  } else {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
        erase_at = i;
      }
    }
    if (path.empty()) return out;
  }
  const bool inline_form = args[erase_at] != "--config";
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(erase_at),
            out.begin() + static_cast<std::ptrdiff_t>(erase_at + (inline_form ? 1 : 2)));
  if (out.empty()) throw UsageError("--config given without a subcommand");

  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(out.front());
  } catch (const CLI::OptionNotFound&) {
    throw UsageError("unknown subcommand " + out.front());
  }
  std::set<std::string> given;
  for (const auto& a : out) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config(path)) {
    if (given.count(key)) continue;
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError("unknown config key '" + key + "'");
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value == "yes") injected.push_back("--" + key);
    } else {
      injected.push_back("--" + key);
      injected.push_back(value);
    }
  }
  out.insert(out.begin() + 1, injected.begin(), injected.end());
  return out;
}

// --- commands -----------------------------------------------------------------

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

struct SimulateArgs {
  std::size_t n = 64;
  std::uint64_t sweeps = 10000;
  SamplerFlags sampler;
  std::string out_dir = "run";
};

inline int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& argv, Streams& io_) {
  const ModelParams params(a.n, a.sampler.sigma);
  const auto chains = run_chains(params, a.sampler, a.sweeps);
  const fs::path dir(a.out_dir);
  io::ensure_directory(dir);
  io::write_file(dir / "samples.csv", samples_csv(chains));
  json p{{"n", a.n}, {"sigma", a.sampler.sigma}, {"sweeps", a.sweeps}};
  write_manifest(dir, "simulate", p, sampler_json(a.sampler), {(dir / "samples.csv").string()}, argv);
  std::size_t rows = 0;
  for (const auto& c : chains) rows += c.size();
  io_.out << "wrote " << rows << " records to " << (dir / "samples.csv").string() << "\n";
  return 0;
}

struct LimitArgs {
  double sigma = 1.0;
  std::vector<double> density, cdf, quantile;
  std::uint64_t sample = 0;
  std::uint64_t seed = 1;
};

inline int cmd_limit(const LimitArgs& a, Streams& io_) {
  const QuarticLaw law(a.sigma);
  for (double p : a.quantile)
    if (!(p > 0.0 && p < 1.0)) throw UsageError("--quantile values must lie in (0, 1)");
  for (double x : a.density) io_.out << io::format_g17(law.density(x)) << "\n";
  for (double x : a.cdf) io_.out << io::format_g17(law.cdf(x)) << "\n";
  for (double p : a.quantile) io_.out << io::format_g17(law.quantile(p)) << "\n";
  if (a.sample > 0) {
    Rng rng(a.seed);
    for (std::uint64_t i = 0; i < a.sample; ++i) io_.out << io::format_g17(law.sample(rng)) << "\n";
  }
  return 0;
}

struct KsArgs {
  std::string input = "-";
  double sigma = 1.0;
  double alpha = 0.05;
};

inline int cmd_ks(const KsArgs& a, Streams& io_) {
  std::vector<double> values;
  if (a.input == "-") {
    values = io::read_numbers(io_.in);
  } else {
    std::ifstream is(a.input);
    if (!is) throw io::IoError("cannot open " + a.input);
    values = io::read_numbers(is);
  }
  if (values.empty()) throw io::IoError("no samples read");
  std::sort(values.begin(), values.end());
  const QuarticLaw law(a.sigma);
  const double d = ks_statistic(values, [&](double x) { return law.cdf(x); });
  const double crit = ks_critical_value(values.size(), a.alpha);
  io_.out << "ks " << io::format_g17(d) << "\ncritical " << io::format_g17(crit) << "\nsamples " << values.size()
          << "\n";
  return d <= crit ? 0 : 1;
}

struct VerifyArgs {
  std::string suite = "all";
  std::vector<std::size_t> n_list;
  std::vector<std::string> tol;
  std::string out_dir = ".";
};

inline json report_json(const std::vector<CheckReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back({{"name", r.name},
                   {"value", r.value},
                   {"expected", r.expected},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass},
                   {"details", r.details}});
  }
  return arr;
}

inline int cmd_verify(const VerifyArgs& a, Streams& io_) {
  VerifyOptions opt;
  if (!a.n_list.empty()) opt.inversion_orders = a.n_list;
  for (std::size_t n : opt.inversion_orders)
    if (n < 5) throw UsageError("--n-list entries must be at least 5");
  for (const auto& kv : a.tol) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects KEY=VALUE, got " + kv);
    double v = 0.0;
    try {
      v = io::parse_double(kv.substr(eq + 1));
    } catch (const io::IoError&) {
      throw UsageError("--tol value is not a number: " + kv);
    }
    if (!opt.tol.set(kv.substr(0, eq), v)) throw UsageError("unknown tolerance key " + kv.substr(0, eq));
  }
  Suite suite = Suite::All;
  if (a.suite == "complex") suite = Suite::Complex;
  if (a.suite == "density") suite = Suite::Density;
  if (a.suite == "laplace") suite = Suite::Laplace;

  const auto reports = run_suite(suite, opt);
  const fs::path dir(a.out_dir);
  io::ensure_directory(dir);
  io::write_file(dir / "report.json", report_json(reports).dump(2) + "\n");
  std::size_t passed = 0;
  for (const auto& r : reports) {
    if (r.pass) ++passed;
    else io_.err << "FAIL " << r.name << ": value=" << r.value << " expected=" << r.expected
                 << " tolerance=" << r.tolerance << " (" << r.details << ")\n";
  }
  io_.out << passed << "/" << reports.size() << " checks passed\n";
  return passed == reports.size() ? 0 : 1;
}

struct ConvergenceArgs {
  std::vector<std::size_t> n_list{32, 64, 128, 256};
  std::uint64_t samples = 20000;
  SamplerFlags sampler;
  std::string out_dir = "convergence";
};

struct ConvergenceRow {
  std::size_t n = 0;
  double ks = 0.0;
  double mean_t = 0.0;
  double sd_t = 0.0;
  std::size_t samples = 0;
};

/// Chains for order n use streams n * 1000 + c of the master seed.
inline ConvergenceRow convergence_row(std::size_t n, const ConvergenceArgs& a) {
  const ModelParams params(n, a.sampler.sigma);
  SamplerConfig cfg{a.sampler.proposal_scale, a.sampler.burn_in, a.sampler.thin, 0};
  const auto chains = run_chains(params, a.sampler, sweeps_for_samples(cfg, a.samples), n * 1000);
  std::vector<double> s_scaled, t_scaled;
  for (const auto& c : chains) {
    for (const auto& r : c) {
      s_scaled.push_back(r.s_scaled);
      t_scaled.push_back(r.t_scaled);
    }
  }
  ConvergenceRow row;
  row.n = n;
  row.samples = s_scaled.size();
  std::sort(s_scaled.begin(), s_scaled.end());
  const QuarticLaw law(a.sampler.sigma);
  row.ks = ks_statistic(s_scaled, [&](double x) { return law.cdf(x); });
  double sum = 0.0;
  for (double t : t_scaled) sum += t;
  row.mean_t = sum / static_cast<double>(t_scaled.size());
  double ss = 0.0;
  for (double t : t_scaled) ss += (t - row.mean_t) * (t - row.mean_t);
  row.sd_t = t_scaled.size() > 1 ? std::sqrt(ss / static_cast<double>(t_scaled.size() - 1)) : 0.0;
  return row;
}

inline int cmd_convergence(const ConvergenceArgs& a, const std::vector<std::string>& argv, Streams& io_) {
  if (a.n_list.empty()) throw UsageError("--n-list must not be empty");
  if (a.samples == 0) throw UsageError("--samples must be positive");
  std::vector<ConvergenceRow> rows(a.n_list.size());
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < a.n_list.size(); ++i)
    workers.emplace_back([&, i] { rows[i] = convergence_row(a.n_list[i], a); });
  for (auto& w : workers) w.join();

  std::string csv = kConvergenceHeader;
  csv += '\n';
  for (const auto& r : rows) {
    csv += std::to_string(r.n) + ',' + io::format_double(r.ks) + ',' + io::format_double(r.mean_t) + ',' +
           io::format_double(r.sd_t) + ',' + std::to_string(r.samples) + '\n';
  }
  const fs::path dir(a.out_dir);
  io::ensure_directory(dir);
  io::write_file(dir / "convergence.csv", csv);
  json p{{"n_list", a.n_list}, {"sigma", a.sampler.sigma}, {"samples", a.samples}};
  write_manifest(dir, "convergence", p, sampler_json(a.sampler), {(dir / "convergence.csv").string()}, argv);

  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].n > rows[i - 1].n && rows[i].ks > rows[i - 1].ks)
      io_.out << "note: ks rose from n=" << rows[i - 1].n << " to n=" << rows[i].n << " ("
              << io::format_double(rows[i - 1].ks) << " -> " << io::format_double(rows[i].ks) << ")\n";
  }
  io_.out << "wrote " << rows.size() << " rows to " << (dir / "convergence.csv").string() << "\n";
  return 0;
}

struct PlotdataArgs {
  std::string input;
  std::size_t bins = 40;
  bool overlay_limit = false;
  std::string column = "s_scaled";
  double sigma = 1.0;
  std::string out;
};

struct HistogramRow {
  double left, right, empirical, limit;
};

/// Equal-width histogram over [min, max], normalized to unit area.
inline std::vector<HistogramRow> histogram(std::vector<double> values, std::size_t bins, const QuarticLaw* law) {
  if (values.empty()) throw io::IoError("no values to histogram");
  if (bins == 0) throw UsageError("--bins must be positive");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  edges.back() = hi;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    idx = std::min(idx, bins - 1);
    // Settle edge rounding against the stored edges.
    while (idx > 0 && v < edges[idx]) --idx;
    while (idx + 1 < bins && v >= edges[idx + 1]) ++idx;
    ++counts[idx];
  }
  const double N = static_cast<double>(values.size());
  std::vector<HistogramRow> rows(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double width = edges[i + 1] - edges[i];
    rows[i] = {edges[i], edges[i + 1], static_cast<double>(counts[i]) / (N * width),
               law ? law->density(0.5 * (edges[i] + edges[i + 1])) : std::nan("")};
  }
  return rows;
}

inline int cmd_plotdata(const PlotdataArgs& a, Streams& io_) {
  const auto values = io::read_csv_column(a.input, a.column);
  const QuarticLaw law(a.sigma);
  const auto rows = histogram(values, a.bins, a.overlay_limit ? &law : nullptr);
  std::string csv = kHistogramHeader;
  csv += '\n';
  for (const auto& r : rows) {
    csv += io::format_double(r.left) + ',' + io::format_double(r.right) + ',' + io::format_double(r.empirical) + ',';
    if (a.overlay_limit) csv += io::format_double(r.limit);
    csv += '\n';
  }
  const fs::path out = a.out.empty() ? fs::path(a.input).parent_path() / "histogram.csv" : fs::path(a.out);
  io::write_file(out, csv);
  io_.out << "wrote " << rows.size() << " bins to " << out.string() << "\n";
  return 0;
}

// --- entry point --------------------------------------------------------------

/// args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Streams io_{in, out, err};
  CLI::App app{"Gaussian Curie-Weiss SOC model: simulation, limit law and numerical verification", "cwsoc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.footer("Options may also come from --config PATH (key=value per line); flags override it.");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run Metropolis chains and write samples.csv + manifest.json");
  simulate->add_option("--n", sim.n, "Number of spins")->check(CLI::PositiveNumber);
  simulate->add_option("--sweeps", sim.sweeps, "Sweeps per chain, burn-in included");
  add_sampler_flags(*simulate, sim.sampler);
  simulate->add_option("--out", sim.out_dir, "Output directory");

  LimitArgs lim;
  auto* limit = app.add_subcommand("limit", "Query the quartic limit law");
  limit->add_option("--sigma", lim.sigma)->check(CLI::PositiveNumber);
  limit->add_option("--density", lim.density, "Density at x");
  limit->add_option("--cdf", lim.cdf, "CDF at x");
  limit->add_option("--quantile", lim.quantile, "Quantile at p in (0, 1)");
  limit->add_option("--sample", lim.sample, "Draw N exact samples");
  limit->add_option("--seed", lim.seed)->envname("CWSOC_SEED");

  KsArgs ks;
  auto* ks_cmd = app.add_subcommand("ks", "KS test of samples (one per line) against the quartic law");
  ks_cmd->add_option("--input", ks.input, "Sample file, '-' for stdin");
  ks_cmd->add_option("--sigma", ks.sigma)->check(CLI::PositiveNumber);
  ks_cmd->add_option("--alpha", ks.alpha)->check(CLI::Range(1e-6, 0.5));

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run numerical verification suites and write report.json");
  verify->add_option("--suite", ver.suite)->check(CLI::IsMember({"complex", "density", "laplace", "all"}));
  verify->add_option("--n-list", ver.n_list, "Orders for the Fourier-inversion checks")->delimiter(',');
  verify->add_option("--tol", ver.tol, "Tolerance override KEY=VALUE (repeatable)");
  verify->add_option("--out", ver.out_dir, "Output directory");

  ConvergenceArgs conv;
  auto* convergence = app.add_subcommand("convergence", "KS distance to the limit law across n");
  convergence->add_option("--n-list", conv.n_list)->delimiter(',');
  convergence->add_option("--samples", conv.samples, "Recorded samples per n");
  add_sampler_flags(*convergence, conv.sampler);
  convergence->add_option("--out", conv.out_dir, "Output directory");

  PlotdataArgs plot;
  auto* plotdata = app.add_subcommand("plotdata", "Histogram of a samples.csv column for plotting");
  plotdata->add_option("--input", plot.input)->required();
  plotdata->add_option("--bins", plot.bins)->check(CLI::PositiveNumber);
  plotdata->add_flag("--overlay-limit", plot.overlay_limit, "Add the limit-law density column");
  plotdata->add_option("--column", plot.column)->check(CLI::IsMember({"s", "t", "s_scaled", "t_scaled"}));
  plotdata->add_option("--sigma", plot.sigma)->check(CLI::PositiveNumber);
  plotdata->add_option("--out", plot.out, "Output file (default: histogram.csv beside the input)");

  try {
    std::vector<std::string> argv = apply_config(args, app);
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);

    if (simulate->parsed()) return cmd_simulate(sim, args, io_);
    if (limit->parsed()) return cmd_limit(lim, io_);
    if (ks_cmd->parsed()) return cmd_ks(ks, io_);
    if (verify->parsed()) return cmd_verify(ver, io_);
    if (convergence->parsed()) return cmd_convergence(conv, args, io_);
    if (plotdata->parsed()) return cmd_plotdata(plot, io_);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, io_.out, io_.err);
      return 0;
    }
    io_.err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const UsageError& e) {
    io_.err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    io_.err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    io_.err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cwsoc::cli
