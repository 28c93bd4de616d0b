#include "satopt/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "satopt/config_io.hpp"
#include "satopt/csv.hpp"
#include "satopt/experiments.hpp"

namespace satopt::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out_dir = "satopt_out";
  std::optional<double> r;
  std::optional<double> w;
  std::optional<std::string> r_grid;
  std::optional<std::string> w_grid;
  std::optional<int> trials;
  std::optional<std::string> starts;
};

std::shared_ptr<spdlog::logger> make_logger() {
  auto logger = spdlog::get("satopt");
  if (!logger) logger = spdlog::stderr_color_mt("satopt");
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  std::string bad;
  if (const char* env = std::getenv("SATOPT_LOG")) {
    const std::string v(env);
    if (v == "error") {
      level = spdlog::level::err;
    } else if (v == "info") {
      level = spdlog::level::info;
    } else if (v == "debug") {
      level = spdlog::level::debug;
    } else if (!v.empty()) {
      bad = v;
    }
  }
  logger->set_level(level);
  if (!bad.empty()) logger->warn("ignoring SATOPT_LOG={} (expected error, info or debug)", bad);
  return logger;
}

double parse_number(const std::string& token, const std::string& what) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
    throw std::invalid_argument("malformed number '" + token + "' in " + what);
  }
  return v;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string num(double v) { return format_number(v); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json json_grid(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

/// Everything that determines the outputs of a command.
json manifest(const Flags& f, const ExperimentSpec& spec, const json& parameters,
              const std::vector<std::string>& files) {
  json m = json::object();
  m["tool"] = "satopt";
  m["tool_version"] = SATOPT_VERSION;
  m["command"] = f.command;
  m["config_path"] = f.config_path;
  m["output_dir"] = f.out_dir;
  m["seed"] = spec.base_seed;
  m["scene_seed"] = spec.scene_seed;
  m["trial_seed_rule"] = "trial seed = base_seed + trial_index";
  m["parameters"] = parameters;
  m["config"] = json::parse(write_config(spec));
  m["files"] = files;
  return m;
}

void begin_outputs(const Flags& f, const ExperimentSpec& spec, const json& parameters,
                   const std::vector<std::string>& files) {
  fs::create_directories(f.out_dir);
  write_text(fs::path(f.out_dir) / "manifest.json", manifest(f, spec, parameters, files).dump(2) + "\n");
}

std::string trace_csv(const ScaTrace& trace) {
  std::ostringstream os;
  CsvWriter csv(os, "SCA trace: iteration (0 = start point), objective F = USC + w P_tot in bps",
                {"iteration", "objective"});
  for (std::size_t i = 0; i < trace.objective_per_iter.size(); ++i) {
    csv.row({static_cast<std::int64_t>(i), trace.objective_per_iter[i]});
  }
  return os.str();
}

int cmd_solve(const Flags& f, ExperimentSpec spec, spdlog::logger& log) {
  const double r = f.r.value_or(spec.r_bps);
  const double w = f.w.value_or(spec.base_config.weight_w_bps_per_watt);
  spec.r_bps = r;
  spec.base_config.weight_w_bps_per_watt = w;
  validate(spec);
  const json params = {{"r_bps", r}, {"w_bps_per_w", w}, {"start", "mu:1"}, {"trial_index", 0}};
  begin_outputs(f, spec, params, {"manifest.json", "trace.csv", "allocation.csv", "metrics.json"});

  const fs::path out(f.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  TrialResult res;
  try {
    res = run_trial(spec, 0, r, w, RunOptions{}.sca);
  } catch (const ScaError& e) {
    write_text(out / "trace.csv", trace_csv(e.trace));
    log.error("{}", e.what());
    return kExitNotConverged;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(out / "trace.csv", trace_csv(res.trace));

  std::ostringstream alloc;
  CsvWriter csv(alloc, "Final allocation: beam and subcarrier (0-based), transmit power in W",
                {"beam", "subcarrier", "power_w"});
  const PowerAllocation& p = res.trace.final_allocation;
  for (int i = 0; i < p.n_beams(); ++i) {
    for (int k = 0; k < p.n_subcarriers(); ++k) {
      csv.row({static_cast<std::int64_t>(i), static_cast<std::int64_t>(k), p.p(i, k)});
    }
  }
  write_text(out / "allocation.csv", alloc.str());

  const BoundReport bound = check_iteration_bound(res.trace, spec.base_config.tolerance_eps);
  json metrics = {
      {"usc_bps", res.sca.usc_bps},
      {"p_tot_w", res.sca.p_tot_w},
      {"objective", res.sca.objective},
      {"iterations", res.trace.iterations},
      {"converged", res.trace.converged},
      {"capacity_bps", res.sca.capacity_bps},
      {"demand_bps", demand_from_slope(r, spec.base_config.n_beams).c_req_bps},
      {"iteration_bound_rhs", bound.rhs},
      {"upa", {{"usc_bps", res.upa.usc_bps}, {"p_tot_w", res.upa.p_tot_w}, {"objective", res.upa.objective}}},
  };
  write_text(out / "metrics.json", metrics.dump(2) + "\n");

  log.info("solve: r={} bps w={} bps/W -> USC={} bps, P_tot={} W, {} iterations ({:.3f} s){}", num(r),
           num(w), num(res.sca.usc_bps), num(res.sca.p_tot_w), res.trace.iterations, secs,
           res.trace.converged ? "" : " [not converged]");
  if (!res.trace.converged) log.error("{}", res.trace.message);
  return res.trace.converged ? kExitOk : kExitNotConverged;
}

std::vector<double> grid_or(const std::optional<std::string>& text, const std::vector<double>& dflt,
                            const char* flag) {
  std::vector<double> g;
  try {
    g = text ? parse_grid(*text) : dflt;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
  if (g.empty()) throw UsageError(std::string(flag) + ": grid is empty");
  return g;
}

int cmd_convergence(const Flags& f, ExperimentSpec spec, spdlog::logger& log) {
  const double r = f.r.value_or(spec.r_bps);
  spec.r_bps = r;
  spec.scheme_w_bps_per_w = grid_or(f.w_grid, spec.scheme_w_bps_per_w, "--w-grid");
  if (f.starts) {
    try {
      spec.starts = parse_starts(*f.starts);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--starts: ") + e.what());
    }
  }
  if (spec.starts.empty()) throw UsageError("--starts: no start points");
  validate(spec);
  json starts = json::array();
  for (const auto& s : spec.starts) starts.push_back(format_start(s));
  const json params = {{"r_bps", r}, {"w_grid_bps_per_w", json_grid(spec.scheme_w_bps_per_w)},
                       {"starts", starts}};
  begin_outputs(f, spec, params, {"manifest.json", "convergence.csv"});

  RunOptions opt;
  opt.jobs = f.jobs;
  const auto traces = convergence_experiment(spec, r, spec.scheme_w_bps_per_w, spec.starts, opt);

  std::ostringstream os;
  CsvWriter csv(os,
                "Convergence traces on one scene: w in bps/W, start_id (mu:x = x times UPA, "
                "random:j = j-th seeded random start), iteration (0 = start), objective in bps",
                {"w_bps_per_w", "start_id", "iteration", "objective"});
  bool all = true;
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.trace.objective_per_iter.size(); ++i) {
      csv.row({t.w_bps_per_w, t.start_id, static_cast<std::int64_t>(i), t.trace.objective_per_iter[i]});
    }
    log.info("convergence: w={} start={} -> {} iterations, F={}{}", num(t.w_bps_per_w), t.start_id,
             t.trace.iterations, num(t.trace.objective_per_iter.back()),
             t.trace.converged ? "" : " [not converged]");
    all = all && t.trace.converged;
  }
  write_text(fs::path(f.out_dir) / "convergence.csv", os.str());
  return all ? kExitOk : kExitNotConverged;
}

int cmd_sweep_r(const Flags& f, ExperimentSpec spec, spdlog::logger& log) {
  spec.r_grid_bps = grid_or(f.r_grid, spec.r_grid_bps, "--r-grid");
  spec.scheme_w_bps_per_w = grid_or(f.w_grid, spec.scheme_w_bps_per_w, "--w-grid");
  if (f.trials) spec.n_trials = *f.trials;
  validate(spec);
  const json params = {{"r_grid_bps", json_grid(spec.r_grid_bps)},
                       {"w_grid_bps_per_w", json_grid(spec.scheme_w_bps_per_w)},
                       {"n_trials", spec.n_trials}};
  begin_outputs(f, spec, params, {"manifest.json", "sweep_r.csv", "sweep_r_trials.csv"});

  RunOptions opt;
  opt.jobs = f.jobs;
  const auto t0 = std::chrono::steady_clock::now();
  const AggregateResult agg = slope_sweep(spec, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream os;
  CsvWriter csv(os,
                "Trial means per (scheme, w, r): scheme upa|sca, w in bps/W (upa rows at w=0), "
                "r in bps, n trials; *_mean/*_sd/*_se = mean, sample sd, standard error; "
                "usc in bps, p_tot in W, objective in bps",
                {"scheme", "w_bps_per_w", "r_bps", "n", "usc_mean", "usc_sd", "usc_se", "p_tot_mean",
                 "p_tot_sd", "p_tot_se", "objective_mean", "objective_sd", "objective_se",
                 "iterations_mean", "iterations_sd", "iterations_se"});
  for (const auto& p : agg.points) {
    csv.row({p.scheme, p.w_bps_per_w, p.r_bps, static_cast<std::int64_t>(p.usc_bps.n), p.usc_bps.mean,
             p.usc_bps.sd, p.usc_bps.std_error, p.p_tot_w.mean, p.p_tot_w.sd, p.p_tot_w.std_error,
             p.objective.mean, p.objective.sd, p.objective.std_error, p.iterations.mean,
             p.iterations.sd, p.iterations.std_error});
  }
  write_text(fs::path(f.out_dir) / "sweep_r.csv", os.str());

  std::ostringstream raw;
  CsvWriter rows(raw,
                 "Per-trial rows: scheme, w in bps/W, r in bps, trial index, scene seed, usc in bps, "
                 "p_tot in W, objective in bps, SCA iterations, converged (1/0)",
                 {"scheme", "w_bps_per_w", "r_bps", "trial", "seed", "usc_bps", "p_tot_w", "objective",
                  "iterations", "converged"});
  bool all = true;
  for (const auto& r : agg.rows) {
    rows.row({r.scheme, r.w_bps_per_w, r.r_bps, static_cast<std::int64_t>(r.trial_index), r.seed,
              r.usc_bps, r.p_tot_w, r.objective, static_cast<std::int64_t>(r.iterations),
              static_cast<std::int64_t>(r.converged ? 1 : 0)});
    all = all && r.converged;
  }
  write_text(fs::path(f.out_dir) / "sweep_r_trials.csv", raw.str());
  log.info("sweep-r: {} points, {} rows ({:.1f} s)", agg.points.size(), agg.rows.size(), secs);
  return all ? kExitOk : kExitNotConverged;
}

int cmd_sweep_w(const Flags& f, ExperimentSpec spec, spdlog::logger& log) {
  const double r = f.r.value_or(spec.r_bps);
  spec.r_bps = r;
  spec.w_grid_bps_per_w = grid_or(f.w_grid, spec.w_grid_bps_per_w, "--w-grid");
  validate(spec);
  try {
    validate_pareto_grid(spec.w_grid_bps_per_w);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--w-grid: ") + e.what());
  }
  const json params = {{"r_bps", r}, {"w_grid_bps_per_w", json_grid(spec.w_grid_bps_per_w)}};
  begin_outputs(f, spec, params, {"manifest.json", "pareto.csv"});

  RunOptions opt;
  opt.jobs = f.jobs;
  const auto points = weight_sweep(spec, spec.scene_seed, r, opt);

  std::ostringstream os;
  CsvWriter csv(os,
                "Weight sweep on one scene, sorted by w: w in bps/W, usc in bps, p_tot in W, "
                "objective in bps, SCA iterations, converged (1/0)",
                {"w_bps_per_w", "usc_bps", "p_tot_w", "objective", "iterations", "converged"});
  bool all = true;
  for (const auto& p : points) {
    csv.row({p.w_bps_per_w, p.usc_bps, p.p_tot_w, p.objective, static_cast<std::int64_t>(p.iterations),
             static_cast<std::int64_t>(p.converged ? 1 : 0)});
    log.info("sweep-w: w={} -> USC={} bps, P_tot={} W", num(p.w_bps_per_w), num(p.usc_bps),
             num(p.p_tot_w));
    all = all && p.converged;
  }
  write_text(fs::path(f.out_dir) / "pareto.csv", os.str());
  return all ? kExitOk : kExitNotConverged;
}

int cmd_validate(const Flags&, const ExperimentSpec& spec, spdlog::logger& log) {
  std::cout << write_config(spec);
  log.info("config is valid");
  return kExitOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text_in) {
  const std::string text = trim(text_in);
  if (text.empty()) throw std::invalid_argument("empty grid");
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(parse_number(trim(tok), "range"));
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0.0) || b < a) throw std::invalid_argument("range needs step > 0 and stop >= start");
    const long n = std::lround(std::floor((b - a) / step + 1e-9)) + 1;
    if (n > 1000000) throw std::invalid_argument("range has too many points");
    for (long i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw std::invalid_argument("empty entry in list '" + text + "'");
    out.push_back(parse_number(tok, "list"));
  }
  if (!text.empty() && text.back() == ',') throw std::invalid_argument("trailing comma in list");
  return out;
}

int run(const std::vector<std::string>& args) {
  auto logger = make_logger();
  CLI::App app{"Energy-efficient multibeam satellite power allocation by successive convex approximation",
               "satopt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(SATOPT_VERSION));

  Flags f;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON configuration file")->required();
    sub->add_option("--seed", f.seed, "Base seed (trial seed = base seed + trial index)");
    sub->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", f.out_dir, "Output directory");
  };
  auto* solve = app.add_subcommand("solve", "Run SCA from UPA on one scene");
  common(solve);
  solve->add_option("--r", f.r, "Traffic slope r in bps");
  solve->add_option("--w", f.w, "Power weight w in bps/W");

  auto* conv = app.add_subcommand("convergence", "Convergence traces from several starts");
  common(conv);
  conv->add_option("--r", f.r, "Traffic slope r in bps");
  conv->add_option("--w-grid", f.w_grid, "Weights in bps/W (list or start:stop:step)");
  conv->add_option("--starts", f.starts, "Start points, e.g. mu:0.1,mu:1.0,random:3");

  auto* sweep_r = app.add_subcommand("sweep-r", "USC and power versus traffic slope");
  common(sweep_r);
  sweep_r->add_option("--r-grid", f.r_grid, "Traffic slopes in bps (list or start:stop:step)");
  sweep_r->add_option("--w-grid", f.w_grid, "SCA weights in bps/W");
  sweep_r->add_option("--trials", f.trials, "Monte Carlo trials per slope")->check(CLI::PositiveNumber);

  auto* sweep_w = app.add_subcommand("sweep-w", "Weight sweep (Pareto points) on one scene");
  common(sweep_w);
  sweep_w->add_option("--r", f.r, "Traffic slope r in bps");
  sweep_w->add_option("--w-grid", f.w_grid, "Weights in bps/W");

  auto* val = app.add_subcommand("validate", "Check a configuration and print it in canonical form");
  common(val);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  f.command = app.get_subcommands().front()->get_name();

  try {
    ExperimentSpec spec = parse_config(f.config_path);
    if (f.seed) spec.base_seed = *f.seed;
    if (f.command == "solve") return cmd_solve(f, std::move(spec), *logger);
    if (f.command == "convergence") return cmd_convergence(f, std::move(spec), *logger);
    if (f.command == "sweep-r") return cmd_sweep_r(f, std::move(spec), *logger);
    if (f.command == "sweep-w") return cmd_sweep_w(f, std::move(spec), *logger);
    return cmd_validate(f, spec, *logger);
  } catch (const ConfigError& e) {
    logger->error("{}", e.what());
    return kExitUsage;
  } catch (const UsageError& e) {
    logger->error("{}", e.what());
    return kExitUsage;
  } catch (const ScaError& e) {
    logger->error("{}", e.what());
    return kExitNotConverged;
  } catch (const std::invalid_argument& e) {
    logger->error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    logger->error("{}", e.what());
    return kExitNotConverged;
  }
}

}  // namespace satopt::cli
