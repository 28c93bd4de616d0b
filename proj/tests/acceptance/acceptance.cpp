// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "satopt/bessel.hpp"
#include "satopt/channel.hpp"
#include "satopt/cli.hpp"
#include "satopt/experiments.hpp"
#include "satopt/sca.hpp"
#include "satopt/subproblem.hpp"

namespace fs = std::filesystem;
using namespace satopt;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int hardware_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Verdict convergence_speed() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentSpec spec;
  RunOptions opt;
  opt.jobs = hardware_jobs();
  const std::vector<double> weights = {0.0, 1e7};
  const auto traces = convergence_experiment(spec, 0.7e9, weights, spec.starts, opt);
  Verdict v;
  int max_iter = 0;
  std::map<double, std::pair<double, double>> range;
  for (const auto& t : traces) {
    if (!t.trace.converged) v.fail("start " + t.start_id + " did not converge");
    max_iter = std::max(max_iter, t.trace.iterations);
    const double f = t.trace.objective_per_iter.back();
    auto [it, fresh] = range.try_emplace(t.w_bps_per_w, f, f);
    it->second.first = std::min(it->second.first, f);
    it->second.second = std::max(it->second.second, f);
  }
  if (traces.size() != weights.size() * 5) v.fail("expected 5 starts per weight");
  if (max_iter > 25) v.fail(fmt("%d iterations > 25", max_iter));
  std::string spreads;
  for (const auto& [w, mm] : range) {
    const double spread = (mm.second - mm.first) / mm.first;
    spreads += fmt(" w=%g: %.3f%%", w, 100 * spread);
    if (spread > 0.02) v.fail(fmt("w=%g spread %.3f%% > 2%%", w, 100 * spread));
  }
  const double secs = seconds_since(t0);
  if (secs > 120.0) v.fail(fmt("%.1f s > 120 s", secs));
  if (v.pass) {
    v.detail = fmt("scene %llu, %zu runs, max %d iterations, spread", static_cast<unsigned long long>(spec.scene_seed),
                   traces.size(), max_iter) +
               spreads + fmt(", %.2f s", secs);
  }
  return v;
}

struct SweepVerdicts {
  Verdict descent, bound, ordering;
};

SweepVerdicts monte_carlo() {
  ExperimentSpec spec;
  RunOptions opt;
  opt.jobs = hardware_jobs();
  const auto t0 = std::chrono::steady_clock::now();
  const AggregateResult res = slope_sweep(spec, opt);
  const double secs = seconds_since(t0);
  SweepVerdicts out;

  // Descent and feasibility.
  std::size_t sca_runs = 0;
  double worst_increase = 0.0;
  for (const TrialRow& r : res.rows) {
    if (r.scheme != "sca") continue;
    ++sca_runs;
    worst_increase = std::max(worst_increase, r.max_relative_increase);
    if (r.max_relative_increase > 1e-6) {
      out.descent.fail(fmt("trial %d r=%g w=%g: relative increase %g", r.trial_index, r.r_bps,
                           r.w_bps_per_w, r.max_relative_increase));
    }
    if (r.infeasible_iterates != 0 || !r.allocation_feasible) {
      out.descent.fail(fmt("trial %d r=%g w=%g: infeasible iterate", r.trial_index, r.r_bps, r.w_bps_per_w));
    }
  }
  if (out.descent.pass) {
    out.descent.detail = fmt("%zu SCA traces, worst relative increase %.3g, all iterates feasible (%.1f s)",
                             sca_runs, worst_increase, secs);
  }

  // Iteration bound.
  std::size_t audited = 0, skipped = 0;
  double tightest = 1e300;
  for (const TrialRow& r : res.rows) {
    if (r.scheme != "sca") continue;
    if (!r.converged) {
      out.bound.fail(fmt("trial %d r=%g w=%g did not converge", r.trial_index, r.r_bps, r.w_bps_per_w));
      continue;
    }
    if (!r.bound_applicable) {
      ++skipped;
      continue;
    }
    ++audited;
    tightest = std::min(tightest, r.bound_rhs - r.iterations);
    if (!r.bound_holds) {
      out.bound.fail(fmt("trial %d r=%g w=%g: %d iterations > %g", r.trial_index, r.r_bps,
                         r.w_bps_per_w, r.iterations, r.bound_rhs));
    }
  }
  if (out.bound.pass) {
    out.bound.detail = fmt("%zu runs audited (%zu with F = 0 skipped), smallest margin %.3g", audited,
                           skipped, tightest);
  }

  // Ordering within one standard error of the paired per-trial difference.
  std::map<std::tuple<double, std::string, double>, std::vector<const TrialRow*>> by;
  for (const TrialRow& r : res.rows) by[{r.r_bps, r.scheme, r.w_bps_per_w}].push_back(&r);
  auto paired_ge = [&](const std::vector<const TrialRow*>& a, const std::vector<const TrialRow*>& b,
                       double TrialRow::*field) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i]->*field - b[i]->*field);
    const Statistic s = summarize(d);
    return s.mean >= -s.std_error;
  };
  Verdict& ord = out.ordering;
  const auto& grid = spec.r_grid_bps;
  for (std::size_t ri = 0; ri < grid.size(); ++ri) {
    const double r = grid[ri];
    const auto& upa_rows = by[{r, "upa", 0.0}];
    const auto& w0 = by[{r, "sca", 0.0}];
    const auto& w10 = by[{r, "sca", 1e7}];
    if (upa_rows.size() != 200 || w0.size() != 200 || w10.size() != 200) {
      ord.fail(fmt("r=%g: missing rows", r));
      continue;
    }
    if (!paired_ge(upa_rows, w10, &TrialRow::usc_bps)) ord.fail(fmt("r=%g: USC_UPA < USC_w10", r));
    if (!paired_ge(w10, w0, &TrialRow::usc_bps)) ord.fail(fmt("r=%g: USC_w10 < USC_w0", r));
    if (!paired_ge(w0, w10, &TrialRow::p_tot_w)) ord.fail(fmt("r=%g: P_w10 > P_w0", r));
    for (const TrialRow* t : w0) {
      if (t->p_tot_w > 500.0 * (1 + 1e-12)) ord.fail(fmt("r=%g: P_w0 above 500 W", r));
    }
    for (const TrialRow* t : upa_rows) {
      if (t->p_tot_w != 500.0) ord.fail(fmt("r=%g: P_UPA = %.17g", r, t->p_tot_w));
    }
    if (ri > 0) {
      for (const char* scheme : {"upa", "sca"}) {
        for (double w : scheme == std::string("upa") ? std::vector<double>{0.0} : spec.scheme_w_bps_per_w) {
          const auto& hi = by[{r, scheme, w}];
          const auto& lo = by[{grid[ri - 1], scheme, w}];
          if (!paired_ge(hi, lo, &TrialRow::usc_bps)) {
            ord.fail(fmt("%s w=%g: mean USC decreases from r=%g to r=%g", scheme, w, grid[ri - 1], r));
          }
        }
      }
    }
  }
  if (ord.pass) {
    const auto find = [&](const char* s, double w, double r) {
      for (const auto& p : res.points) {
        if (p.scheme == s && p.w_bps_per_w == w && p.r_bps == r) return p;
      }
      return AggregatePoint{};
    };
    const AggregatePoint u = find("upa", 0.0, 0.7e9), a = find("sca", 1e7, 0.7e9), b = find("sca", 0.0, 0.7e9);
    ord.detail = fmt("10 slopes x 200 trials; at r=0.7 Gbps USC %.4g >= %.4g >= %.4g bps, P %.4g >= %.4g W",
                     u.usc_bps.mean, a.usc_bps.mean, b.usc_bps.mean, b.p_tot_w.mean, a.p_tot_w.mean);
  }
  return out;
}

Verdict pareto_structure() {
  const ExperimentSpec spec;
  const auto pts = weight_sweep(spec, spec.scene_seed, spec.r_bps);
  Verdict v;
  const double eps = spec.base_config.tolerance_eps;
  for (const auto& p : pts) {
    if (!p.converged) v.fail(fmt("w=%g did not converge", p.w_bps_per_w));
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].p_tot_w > pts[i - 1].p_tot_w * 1.01) v.fail(fmt("P_tot rises at w=%g", pts[i].w_bps_per_w));
    if (pts[i].usc_bps < pts[i - 1].usc_bps * 0.99) v.fail(fmt("USC falls at w=%g", pts[i].w_bps_per_w));
  }
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      if (a.usc_bps < b.usc_bps * (1 - eps) && a.p_tot_w < b.p_tot_w * (1 - eps)) {
        v.fail(fmt("w=%g dominated by w=%g", b.w_bps_per_w, a.w_bps_per_w));
      }
    }
  }
  if (v.pass) {
    v.detail = fmt("scene %llu, %zu points, USC %.4g..%.4g bps, P_tot %.4g..%.4g W",
                   static_cast<unsigned long long>(spec.scene_seed), pts.size(), pts.front().usc_bps,
                   pts.back().usc_bps, pts.front().p_tot_w, pts.back().p_tot_w);
  }
  return v;
}

LogPower random_log_power(std::mt19937_64& rng, const SystemConfig& cfg) {
  const double hi = cfg.p_tot_max_w / (cfg.n_beams * cfg.n_subcarriers);
  std::uniform_real_distribution<double> u(std::log2(cfg.p_floor_w), std::log2(hi));
  Eigen::MatrixXd y(cfg.n_beams, cfg.n_subcarriers);
  for (int i = 0; i < y.rows(); ++i)
    for (int k = 0; k < y.cols(); ++k) y(i, k) = u(rng);
  return LogPower(y);
}

Verdict linearization() {
  Verdict v;
  const SystemConfig cfg;
  std::mt19937_64 rng(2024);
  double worst_tangent = 0.0, worst_under = -1e300, worst_fd = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const ChannelMatrix g = build_channel(cfg, sample_scene(cfg, 100 + s % 25));
    const LogPower y = random_log_power(rng, cfg);
    const LogPower y_bar = random_log_power(rng, cfg);
    const int i = s % cfg.n_beams;
    const double c_bar = capacity(to_power(y_bar), g, cfg, i);
    const double tangent = std::abs(linearize_capacity(y_bar, y_bar, g, cfg, i) - c_bar) / c_bar;
    worst_tangent = std::max(worst_tangent, tangent);
    if (tangent > 1e-9) v.fail(fmt("pair %d: tangency error %g", s, tangent));
    const double gap = linearize_capacity(y, y_bar, g, cfg, i) - capacity(to_power(y), g, cfg, i);
    worst_under = std::max(worst_under, gap);
    if (gap > 1e-6) v.fail(fmt("pair %d: surrogate exceeds capacity by %g bps", s, gap));
  }
  const ChannelMatrix g = build_channel(cfg, sample_scene(cfg, 7));
  for (int s = 0; s < 100; ++s) {
    const LogPower y = random_log_power(rng, cfg);
    const int i = s % cfg.n_beams, k = (s / cfg.n_beams) % cfg.n_subcarriers;
    const Eigen::VectorXd yk = y.y.col(k);
    const Eigen::VectorXd grad = phi_gradient(yk, g, i, k);
    const Eigen::VectorXd fd = testing::phi_central_difference(yk, g, i, k);
    const double rel = (fd - grad).cwiseAbs().maxCoeff() / grad.cwiseAbs().maxCoeff();
    worst_fd = std::max(worst_fd, rel);
    if (rel > 1e-6) v.fail(fmt("point %d: gradient relative error %g", s, rel));
  }
  if (v.pass) {
    v.detail = fmt("tangency %.2g, max surrogate - capacity %.3g bps (1000 pairs), gradient rel. error %.2g (100 points)",
                   worst_tangent, worst_under, worst_fd);
  }
  return v;
}

Verdict small_instances() {
  Verdict v;
  int rescued = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const testing::ToyInstance t = testing::make_toy_instance(seed);
    const testing::GridBest grid = testing::power_grid_oracle(t, 400);
    double best = run_sca(t.g, t.cfg, t.demand, upa(t.cfg)).final_metrics.objective;
    if (best > grid.objective * 1.01) {
      ++rescued;
      for (const auto& s : make_starts({StartSpec::random(5)}, t.cfg, seed)) {
        best = std::min(best, run_sca(t.g, t.cfg, t.demand, s.p).final_metrics.objective);
      }
    }
    const double rel = (best - grid.objective) / std::max(grid.objective, 1e-300);
    worst = std::max(worst, rel);
    if (best > grid.objective * 1.01) {
      v.fail(fmt("instance %llu: local minimum %.6g vs grid %.6g at p = (%g, %g) W",
                 static_cast<unsigned long long>(seed), best, grid.objective, grid.p1, grid.p2));
    }
  }
  if (v.pass) {
    v.detail = fmt("20 instances, worst relative gap to grid %.3g, %d needed random restarts", worst, rescued);
  }
  return v;
}

Verdict pattern_anchors() {
  Verdict v;
  const SystemConfig cfg;
  const double gmax = db_to_linear(cfg.g_max_dbi);
  const double th3 = cfg.theta_3db_deg * M_PI / 180.0;
  if (antenna_gain(0.0, gmax, th3) != gmax) v.fail("G(0) != Gmax");
  const double half = antenna_gain(th3, gmax, th3) / (gmax / 2) - 1.0;
  if (std::abs(half) > 1e-3) v.fail(fmt("G(theta3dB) off by %g relative", half));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const double x = u(rng);
    const int n = s % 2 == 0 ? 1 : 3;
    const double err = std::abs(bessel_j(n, x) - testing::bessel_series_oracle(n, x));
    worst = std::max(worst, err);
    if (err > 1e-10) v.fail(fmt("J%d(%g) off by %g", n, x, err));
  }
  if (v.pass) v.detail = fmt("G(theta3dB)/(Gmax/2) - 1 = %.2g, worst Bessel error %.2g on 100 points", half, worst);
  return v;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = s.str();
  }
  return files;
}

Verdict determinism(const fs::path& root) {
  Verdict v;
  fs::create_directories(root);
  const std::string config = (root / "config.json").string();
  std::ofstream(config) << "{}\n";
  const std::vector<std::vector<std::string>> commands = {
      {"solve"},
      {"convergence"},
      {"sweep-r", "--trials", "3", "--r-grid", "0.2e9,0.7e9"},
      {"sweep-w"},
  };
  std::size_t compared = 0;
  for (const auto& cmd : commands) {
    const fs::path out = root / cmd[0];
    fs::remove_all(out);
    std::map<std::string, std::string> first;
    for (int jobs : {1, 2}) {
      std::vector<std::string> args = {"satopt"};
      args.insert(args.end(), cmd.begin(), cmd.end());
      for (const char* a : {"--config", config.c_str(), "--out", out.c_str(), "--jobs"}) args.emplace_back(a);
      args.push_back(std::to_string(jobs));
      const int rc = cli::run(args);
      if (rc != cli::kExitOk) v.fail(cmd[0] + fmt(" exited with %d", rc));
      const auto files = snapshot(out);
      if (jobs == 1) {
        first = files;
      } else if (files != first) {
        v.fail(cmd[0] + ": outputs differ between runs");
      } else {
        compared += files.size();
      }
    }
  }
  if (v.pass) v.detail = fmt("4 commands re-run (jobs 1 then 2), %zu files byte-identical", compared);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = fs::temp_directory_path() / "satopt_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--out") out = argv[i + 1];
  }

  bool all = true;
  auto report = [&](int n, const char* name, auto&& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    all = all && v.pass;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", n, name, v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "convergence speed", convergence_speed);
  SweepVerdicts mc;
  bool mc_done = false;
  auto sweep = [&]() -> SweepVerdicts& {
    if (!mc_done) {
      mc = monte_carlo();
      mc_done = true;
    }
    return mc;
  };
  report(2, "descent and feasibility", [&] { return sweep().descent; });
  report(3, "iteration bound", [&] { return sweep().bound; });
  report(4, "trade-off ordering", [&] { return sweep().ordering; });
  report(5, "Pareto structure", pareto_structure);
  report(6, "linearization", linearization);
  report(7, "small-instance oracle", small_instances);
  report(8, "pattern anchors", pattern_anchors);
  report(9, "determinism", [&] { return determinism(out); });
  return all ? 0 : 1;
}
