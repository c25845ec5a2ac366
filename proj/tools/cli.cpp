#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ciss/bench.hpp"
#include "ciss/bench_io.hpp"
#include "ciss/classical.hpp"
#include "ciss/s_scan.hpp"
#include "ciss/surface_io.hpp"
#include "json.hpp"

namespace ciss::cli {

namespace {

using nlohmann::json;
using scan::format_decimal;

/// Usage errors detected after CLI11 has accepted the flags.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

void emit(const std::string& document, const std::string& out_path,
          std::ostream& out) {
  if (out_path.empty()) {
    out << document;
  } else {
    write_file(out_path, document);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bench::ExperimentConfig load_config(const std::string& path,
                                    std::optional<std::uint64_t> seed) {
  bench::ExperimentConfig cfg;
  try {
    if (!path.empty()) cfg = bench::parse_config(read_file(path));
  } catch (const bench::ConfigError& e) {
    throw UsageError(e.what());
  }
  if (seed) cfg.rng_seed = *seed;
  return cfg;
}

std::string triple_text(const scan::AngleTriple& t) {
  return "(" + format_decimal(t.theta_a.degrees()) + ", " +
         format_decimal(t.theta_b.degrees()) + ", " +
         format_decimal(t.theta_c.degrees()) + ")";
}

json triple_json(const scan::AngleTriple& t) {
  return {t.theta_a.degrees(), t.theta_b.degrees(), t.theta_c.degrees()};
}

// ---- scan ------------------------------------------------------------------

struct ScanArgs {
  std::optional<double> fix_a, fix_b, fix_c;
  double step = 6.0;
  std::string out;
  std::string format = "csv";
};

int do_scan(const ScanArgs& a, std::ostream& out) {
  if (!(a.step > 0.0)) throw UsageError("--step must be > 0");
  std::array<scan::ScanGrid, 3> grids{scan::ScanGrid::fixed(0.0),
                                      scan::ScanGrid::fixed(0.0),
                                      scan::ScanGrid::fixed(0.0)};
  const std::array<std::optional<double>, 3> fixed{a.fix_a, a.fix_b, a.fix_c};
  try {
    for (int k = 0; k < 3; ++k) {
      grids[k] = fixed[k] ? scan::ScanGrid::fixed(*fixed[k])
                          : scan::ScanGrid::full(a.step);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto land = scan::grid_scan(grids);
  emit(scan::export_surface(land, scan::parse_format(a.format)), a.out, out);
  return kOk;
}

// ---- optimize --------------------------------------------------------------

struct OptimizeArgs {
  double step = 6.0;
  double tol = 0.01;
  int starts = scan::kDefaultStarts;
  std::string format = "text";
};

int do_optimize(const OptimizeArgs& a, std::ostream& out) {
  if (!(a.step > 0.0)) throw UsageError("--step must be > 0");
  if (!(a.tol > 0.0)) throw UsageError("--tol must be > 0");
  if (a.starts < 1) throw UsageError("--starts must be >= 1");
  std::optional<scan::ScanGrid> grid;
  try {
    grid = scan::ScanGrid::full(a.step);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto opt = scan::minimize_s(*grid, a.tol, a.starts);
  if (a.format == "json") {
    json doc = {{"s_min", opt.s_min},
                {"coarse_min", opt.coarse_min},
                {"evaluations", opt.evaluations},
                {"argmin", json::array()}};
    for (const auto& t : opt.degenerate) doc["argmin"].push_back(triple_json(t));
    out << doc.dump() << '\n';
    return kOk;
  }
  out << "s_min        " << format_decimal(opt.s_min) << '\n';
  out << "coarse_min   " << format_decimal(opt.coarse_min) << '\n';
  out << "evaluations  " << opt.evaluations << '\n';
  for (const auto& t : opt.degenerate) {
    out << "argmin       " << triple_text(t) << "  S = "
        << format_decimal(scan::s_quantum(t)) << '\n';
  }
  return kOk;
}

// ---- classical-verify ------------------------------------------------------

struct VerifyArgs {
  long long samples = 10000;
  std::uint64_t seed = 1;
  std::string format = "text";
};

int do_classical_verify(const VerifyArgs& a, std::ostream& out) {
  if (a.samples < 1) throw UsageError("--samples must be >= 1");
  constexpr double kTol = classical::kCissEpsilon;
  const auto vertices = classical::enumerate_vertices();

  // Flat Dirichlet draws: normalized unit exponentials.
  std::mt19937_64 rng(a.seed);
  std::exponential_distribution<double> expo(1.0);
  double s_lo = std::numeric_limits<double>::infinity();
  double s_hi = -s_lo;
  long long violations = 0;
  for (long long n = 0; n < a.samples; ++n) {
    std::array<double, classical::kAtomCount> w;
    double sum = 0.0;
    for (double& x : w) sum += (x = expo(rng));
    for (double& x : w) x /= sum;
    const double s = classical::s_classical(classical::ClassicalEnsemble(w));
    s_lo = std::min(s_lo, s);
    s_hi = std::max(s_hi, s);
    if (s < -kTol || s > 1.0 + kTol) ++violations;
  }
  const double sample_lo = s_lo, sample_hi = s_hi;
  for (const auto& v : vertices) {
    s_lo = std::min(s_lo, v.s);
    s_hi = std::max(s_hi, v.s);
    if (v.s < -kTol || v.s > 1.0 + kTol) ++violations;
  }

  if (a.format == "json") {
    json doc = {{"vertices", json::array()},
                {"samples", a.samples},
                {"seed", a.seed},
                {"s_min", s_lo},
                {"s_max", s_hi},
                {"sample_s_min", sample_lo},
                {"sample_s_max", sample_hi},
                {"violations", violations}};
    for (const auto& v : vertices) {
      doc["vertices"].push_back({{"state", v.state.label()}, {"S", v.s}});
    }
    out << doc.dump() << '\n';
  } else {
    out << "vertices\n";
    for (const auto& v : vertices) {
      out << "  " << v.state.label() << "  S = " << format_decimal(v.s) << '\n';
    }
    out << "samples      " << a.samples << " (seed " << a.seed << ")\n";
    out << "sampled S    [" << format_decimal(sample_lo) << ", "
        << format_decimal(sample_hi) << "]\n";
    out << "S min        " << format_decimal(s_lo) << '\n';
    out << "S max        " << format_decimal(s_hi) << '\n';
    out << "violations   " << violations << '\n';
  }
  return violations == 0 ? kOk : kClassicalViolation;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  double p_ab = 0.0, p_bc = 0.0, p_ac = 0.0;
  std::string format = "text";
};

int do_fit(const FitArgs& a, std::ostream& out) {
  std::optional<classical::JointTriple> triple;
  try {
    triple.emplace(a.p_ac, a.p_ab, a.p_bc);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto ens = classical::fit_classical(*triple);
  const bool ciss = classical::ciss_check(*triple);
  if (a.format == "json") {
    json doc = {{"p_ab", a.p_ab},
                {"p_bc", a.p_bc},
                {"p_ac", a.p_ac},
                {"S", triple->s()},
                {"ciss", ciss},
                {"feasible", ens.has_value()}};
    if (ens) {
      json w = json::object();
      for (const auto& s : classical::all_states()) w[s.label()] = ens->weight(s);
      doc["ensemble"] = w;
    }
    out << doc.dump() << '\n';
  } else {
    out << "S            " << format_decimal(triple->s()) << '\n';
    out << "CISS         " << (ciss ? "satisfied" : "violated") << '\n';
    if (ens) {
      out << "FEASIBLE\n";
      for (const auto& s : classical::all_states()) {
        out << "  " << s.label() << "  " << format_decimal(ens->weight(s)) << '\n';
      }
    } else {
      out << "INFEASIBLE (quantum-signature)\n";
    }
  }
  return ens ? kOk : kInfeasible;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  double theta_a = 157.0, theta_b = 123.5, theta_c = 77.5;
  std::optional<std::uint64_t> seed;
  bool subtract = false;
  std::string format = "text";
};

bench::EstimatorOptions estimator_for(const bench::ExperimentConfig& cfg,
                                      bool subtract) {
  bench::EstimatorOptions o;
  o.subtract_accidentals = subtract;
  o.dark_rate_d1 = cfg.dark_rate_d1;
  o.dark_rate_d2 = cfg.dark_rate_d2;
  o.coincidence_window = cfg.coincidence_window;
  return o;
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto cfg = load_config(a.config, a.seed);
  const scan::AngleTriple t(a.theta_a, a.theta_b, a.theta_c);
  const auto m = bench::measure_S(cfg, t, estimator_for(cfg, a.subtract));
  if (a.format == "json") {
    out << bench::export_measurement(m, scan::Format::Json);
  } else if (a.format == "csv") {
    out << bench::export_measurement(m, scan::Format::Csv);
  } else {
    out << "angles       " << triple_text(t) << '\n';
    out << "P(a+b-)      " << format_decimal(m.p_ab.value) << " +- "
        << format_decimal(m.p_ab.std_error) << '\n';
    out << "P(b+c-)      " << format_decimal(m.p_bc.value) << " +- "
        << format_decimal(m.p_bc.std_error) << '\n';
    out << "P(a+c-)      " << format_decimal(m.p_ac.value) << " +- "
        << format_decimal(m.p_ac.std_error) << '\n';
    out << "S            " << format_decimal(m.s.value) << " +- "
        << format_decimal(m.s.std_error) << '\n';
    out << "S theory     " << format_decimal(scan::s_quantum(t)) << '\n';
    out << "violation    " << format_decimal(m.s.sigma_violation) << " sigma\n";
  }
  return kOk;
}

// ---- full-scan -------------------------------------------------------------

struct FullScanArgs {
  std::string config;
  std::string out_dir;
  double theta_a = 156.0, theta_b = 126.0;
  std::optional<std::uint64_t> seed;
  bool subtract = false;
  std::string format = "csv";
};

int do_full_scan(const FullScanArgs& a, std::ostream& out) {
  const auto cfg = load_config(a.config, a.seed);
  bench::FullScanOptions opts;
  opts.theta_a = a.theta_a;
  opts.theta_b = a.theta_b;
  opts.estimator = estimator_for(cfg, a.subtract);
  bench::FullScan result;
  try {
    result = bench::run_full_scan(cfg, opts);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto fmt = scan::parse_format(a.format);
  const std::string ext = a.format == "json" ? ".json" : ".csv";
  const std::filesystem::path dir(a.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  write_file(dir / ("surface" + ext), bench::export_nodes(result.surface, fmt, true));
  write_file(dir / ("profile" + ext), bench::export_nodes(result.profile, fmt, false));

  auto summarize = [&](const char* name, const std::vector<bench::ScanNode>& nodes) {
    std::size_t within = 0;
    const bench::ScanNode* best = nullptr;
    for (const auto& n : nodes) {
      if (!n.simulated) continue;
      if (std::abs(n.simulated->value - n.theory) <= 3.0 * n.simulated->std_error + 1e-12) {
        ++within;
      }
      if (!best || n.simulated->value < best->simulated->value) best = &n;
    }
    out << name << ": " << nodes.size() << " nodes, " << within
        << " within 3 sigma of theory";
    if (best) {
      out << ", minimum S = " << format_decimal(best->simulated->value) << " +- "
          << format_decimal(best->simulated->std_error) << " at (theta_b, theta_c) = ("
          << format_decimal(best->theta_b) << ", " << format_decimal(best->theta_c)
          << ")";
    }
    out << '\n';
  };
  summarize("surface", result.surface);
  summarize("profile", result.profile);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Prepare-and-measure quantumness criterion toolkit"};
  app.name("ciss");
  app.require_subcommand(1);

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand("scan", "Export the quantum S landscape");
  scan_cmd->add_option("--fix-a", scan_args.fix_a, "Pin theta_a (degrees)");
  scan_cmd->add_option("--fix-b", scan_args.fix_b, "Pin theta_b (degrees)");
  scan_cmd->add_option("--fix-c", scan_args.fix_c, "Pin theta_c (degrees)");
  scan_cmd->add_option("--step", scan_args.step, "Grid step over [0, 180] (degrees)");
  scan_cmd->add_option("--out", scan_args.out, "Output file (default stdout)");
  scan_cmd->add_option("--format", scan_args.format)
      ->check(CLI::IsMember({"csv", "json"}));

  OptimizeArgs opt_args;
  auto* opt_cmd = app.add_subcommand("optimize", "Locate the quantum minimum of S");
  opt_cmd->add_option("--step", opt_args.step, "Coarse grid step (degrees)");
  opt_cmd->add_option("--tol", opt_args.tol, "Refinement tolerance (degrees)");
  opt_cmd->add_option("--starts", opt_args.starts, "Number of refinement starts");
  opt_cmd->add_option("--format", opt_args.format)
      ->check(CLI::IsMember({"text", "json"}));

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand(
      "classical-verify", "Check the classical bound over vertices and random ensembles");
  verify_cmd->add_option("--samples", verify_args.samples, "Random ensembles to draw");
  verify_cmd->add_option("--seed", verify_args.seed);
  verify_cmd->add_option("--format", verify_args.format)
      ->check(CLI::IsMember({"text", "json"}));

  FitArgs fit_args;
  auto* fit_cmd =
      app.add_subcommand("fit", "Fit a classical ensemble to three joint probabilities");
  fit_cmd->add_option("--p-ab", fit_args.p_ab)->required();
  fit_cmd->add_option("--p-bc", fit_args.p_bc)->required();
  fit_cmd->add_option("--p-ac", fit_args.p_ac)->required();
  fit_cmd->add_option("--format", fit_args.format)
      ->check(CLI::IsMember({"text", "json"}));

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Estimate S on the virtual bench");
  sim_cmd->add_option("--config", sim_args.config, "ExperimentConfig JSON file");
  sim_cmd->add_option("--theta-a", sim_args.theta_a);
  sim_cmd->add_option("--theta-b", sim_args.theta_b);
  sim_cmd->add_option("--theta-c", sim_args.theta_c);
  sim_cmd->add_option("--seed", sim_args.seed, "Override rng_seed");
  sim_cmd->add_flag("--subtract-accidentals", sim_args.subtract);
  sim_cmd->add_option("--format", sim_args.format)
      ->check(CLI::IsMember({"text", "json", "csv"}));

  FullScanArgs full_args;
  auto* full_cmd = app.add_subcommand(
      "full-scan", "Simulate every P2/HWP setting and rebuild the S slices");
  full_cmd->add_option("--config", full_args.config, "ExperimentConfig JSON file");
  full_cmd->add_option("--out", full_args.out_dir, "Output directory")->required();
  full_cmd->add_option("--theta-a", full_args.theta_a);
  full_cmd->add_option("--theta-b", full_args.theta_b);
  full_cmd->add_option("--seed", full_args.seed, "Override rng_seed");
  full_cmd->add_flag("--subtract-accidentals", full_args.subtract);
  full_cmd->add_option("--format", full_args.format)
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (*scan_cmd) return do_scan(scan_args, out);
    if (*opt_cmd) return do_optimize(opt_args, out);
    if (*verify_cmd) return do_classical_verify(verify_args, out);
    if (*fit_cmd) return do_fit(fit_args, out);
    if (*sim_cmd) return do_simulate(sim_args, out);
    if (*full_cmd) return do_full_scan(full_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const bench::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const bench::InsufficientStatistics& e) {
    err << "error: insufficient statistics: " << e.what() << '\n';
    return kInsufficientStatistics;
  }
  return kUsageError;
}

}  // namespace ciss::cli
