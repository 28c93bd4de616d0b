#include "satopt/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "satopt/channel.hpp"

namespace satopt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trial_context(int trial_index, std::uint64_t seed, double r, double w) {
  std::ostringstream os;
  os << "trial " << trial_index << " (seed " << seed << ", r=" << shortest(r)
     << " bps, w=" << shortest(w) << " bps/W): ";
  return os.str();
}

ScaTrace run_with_context(const std::string& context, const ChannelMatrix& g,
                          const SystemConfig& cfg, const TrafficDemand& demand,
                          const PowerAllocation& start, const ScaOptions& options) {
  try {
    return run_sca(g, cfg, demand, start, options);
  } catch (ScaError& e) {
    throw ScaError(context + e.what(), std::move(e.trace));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(context + e.what());
  }
}

ChannelMatrix scene_channel(const SystemConfig& cfg, std::uint64_t seed) {
  return build_channel(cfg, sample_scene(cfg, seed));
}

TrialRow sca_row(const ScaTrace& trace, const SystemConfig& cfg, double w, double r,
                 int trial_index, std::uint64_t seed) {
  TrialRow row;
  row.scheme = "sca";
  row.w_bps_per_w = w;
  row.r_bps = r;
  row.trial_index = trial_index;
  row.seed = seed;
  row.usc_bps = trace.final_metrics.usc_bps;
  row.p_tot_w = trace.final_metrics.p_tot_w;
  row.objective = trace.final_metrics.objective;
  row.iterations = trace.iterations;
  row.converged = trace.converged;
  row.infeasible_iterates = trace.infeasible_iterates;
  row.epigraph_violations = trace.epigraph_violations;
  row.max_relative_increase = trace.max_relative_increase;
  const BoundReport bound = check_iteration_bound(trace, cfg.tolerance_eps);
  row.bound_applicable = bound.applicable;
  row.bound_holds = bound.holds;
  row.bound_rhs = bound.rhs;
  row.allocation_feasible = static_cast<bool>(is_feasible(trace.final_allocation, cfg));
  return row;
}

auto group_key(const TrialRow& r) { return std::make_tuple(r.r_bps, r.scheme, r.w_bps_per_w); }

}  // namespace

StartSpec parse_start(std::string_view token) {
  token = trim(token);
  const auto colon = token.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("start descriptor '" + std::string(token) +
                                "' must be mu:<scale> or random:<count>");
  }
  const std::string_view kind = trim(token.substr(0, colon));
  const std::string_view value = trim(token.substr(colon + 1));
  const char* first = value.data();
  const char* last = value.data() + value.size();
  if (kind == "mu") {
    double mu = 0.0;
    const auto res = std::from_chars(first, last, mu);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(mu) || !(mu > 0.0)) {
      throw std::invalid_argument("start descriptor '" + std::string(token) +
                                  "': scale must be a positive number");
    }
    return StartSpec::scaled_upa(mu);
  }
  if (kind == "random") {
    int count = 0;
    const auto res = std::from_chars(first, last, count);
    if (res.ec != std::errc{} || res.ptr != last || count < 1) {
      throw std::invalid_argument("start descriptor '" + std::string(token) +
                                  "': count must be a positive integer");
    }
    return StartSpec::random(count);
  }
  throw std::invalid_argument("start descriptor '" + std::string(token) +
                              "': unknown kind (expected mu or random)");
}

std::vector<StartSpec> parse_starts(std::string_view text) {
  std::vector<StartSpec> out;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view token = trim(text.substr(0, comma));
    if (token.empty()) throw std::invalid_argument("empty start descriptor in list");
    out.push_back(parse_start(token));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_start(const StartSpec& start) {
  if (start.kind == StartSpec::Kind::kScaledUpa) return "mu:" + shortest(start.mu);
  return "random:" + std::to_string(start.count);
}

std::vector<NamedStart> make_starts(const std::vector<StartSpec>& starts, const SystemConfig& cfg,
                                    std::uint64_t seed) {
  std::vector<NamedStart> out;
  const PowerAllocation uniform = upa(cfg);
  const double hi = cfg.p_tot_max_w / (cfg.n_beams * cfg.n_subcarriers);
  int random_index = 0;
  for (const StartSpec& s : starts) {
    if (s.kind == StartSpec::Kind::kScaledUpa) {
      if (!std::isfinite(s.mu) || !(s.mu > 0.0)) {
        throw std::invalid_argument("start " + format_start(s) + ": scale must be > 0");
      }
      PowerAllocation p(uniform.p * s.mu);
      if (!is_feasible(p, cfg)) {
        throw std::invalid_argument("start " + format_start(s) +
                                    " violates the power budgets (scale must be <= 1)");
      }
      out.push_back({format_start(s), std::move(p)});
      continue;
    }
    if (s.count < 1) throw std::invalid_argument("random start count must be >= 1");
    for (int c = 0; c < s.count; ++c) {
      ++random_index;
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(random_index)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> draw(cfg.p_floor_w, hi);
      PowerAllocation p(cfg.n_beams, cfg.n_subcarriers);
      for (int i = 0; i < cfg.n_beams; ++i) {
        for (int k = 0; k < cfg.n_subcarriers; ++k) p.p(i, k) = draw(rng);
      }
      double scale = 1.0;
      const double total = total_power(p);
      if (total > cfg.p_tot_max_w) scale = std::min(scale, cfg.p_tot_max_w / total);
      for (int i = 0; i < cfg.n_beams; ++i) {
        const double beam = p.p.row(i).sum();
        if (beam > cfg.p_beam_max_w) scale = std::min(scale, cfg.p_beam_max_w / beam);
      }
      if (scale < 1.0) p.p = (p.p * scale).cwiseMax(cfg.p_floor_w);
      out.push_back({"random:" + std::to_string(random_index), std::move(p)});
    }
  }
  return out;
}

void validate(const ExperimentSpec& spec) {
  validate(spec.base_config);
  if (spec.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (!std::isfinite(spec.r_bps) || spec.r_bps < 0.0) {
    throw std::invalid_argument("r_bps must be finite and >= 0");
  }
  for (double r : spec.r_grid_bps) {
    if (!std::isfinite(r) || r < 0.0) throw std::invalid_argument("r_grid_bps entries must be >= 0");
  }
  for (const auto* grid : {&spec.w_grid_bps_per_w, &spec.scheme_w_bps_per_w}) {
    for (double w : *grid) {
      if (!std::isfinite(w) || w < 0.0) {
        throw std::invalid_argument("weight grids must hold finite values >= 0");
      }
    }
  }
  for (const StartSpec& s : spec.starts) {
    if (s.kind == StartSpec::Kind::kScaledUpa && !(s.mu > 0.0 && s.mu <= 1.0)) {
      throw std::invalid_argument("start " + format_start(s) + ": scale must lie in (0, 1]");
    }
    if (s.kind == StartSpec::Kind::kRandom && s.count < 1) {
      throw std::invalid_argument("random start count must be >= 1");
    }
  }
}

TrialResult run_trial(const ExperimentSpec& spec, int trial_index, double r_bps, double w_bps_per_w,
                      const ScaOptions& options) {
  if (trial_index < 0) throw std::invalid_argument("run_trial: trial_index must be >= 0");
  SystemConfig cfg = spec.base_config;
  cfg.weight_w_bps_per_watt = w_bps_per_w;
  validate(cfg);

  TrialResult out;
  out.trial_index = trial_index;
  out.seed = spec.trial_seed(trial_index);
  const ChannelMatrix g = scene_channel(cfg, out.seed);
  const TrafficDemand demand = demand_from_slope(r_bps, cfg.n_beams);
  const PowerAllocation start = upa(cfg);
  out.upa = evaluate(start, g, cfg, demand);
  out.trace = run_with_context(trial_context(trial_index, out.seed, r_bps, w_bps_per_w), g, cfg,
                               demand, start, options);
  out.sca = out.trace.final_metrics;
  return out;
}

std::vector<ConvergenceTrace> convergence_experiment(const ExperimentSpec& spec, double r_bps,
                                                     const std::vector<double>& w_list,
                                                     const std::vector<StartSpec>& starts,
                                                     const RunOptions& options) {
  if (w_list.empty()) throw std::invalid_argument("convergence_experiment: empty weight list");
  if (starts.empty()) throw std::invalid_argument("convergence_experiment: empty start list");
  validate(spec.base_config);
  const std::uint64_t seed = spec.scene_seed;
  const ChannelMatrix g = scene_channel(spec.base_config, seed);
  const TrafficDemand demand = demand_from_slope(r_bps, spec.base_config.n_beams);
  const std::vector<NamedStart> points = make_starts(starts, spec.base_config, seed);

  const int per_w = static_cast<int>(points.size());
  const int n = static_cast<int>(w_list.size()) * per_w;
  return parallel_map<ConvergenceTrace>(n, options.jobs, [&](int idx) {
    const double w = w_list[idx / per_w];
    const NamedStart& start = points[idx % per_w];
    SystemConfig cfg = spec.base_config;
    cfg.weight_w_bps_per_watt = w;
    validate(cfg);
    std::ostringstream ctx;
    ctx << "scene seed " << seed << ", start " << start.id << ", w=" << shortest(w) << " bps/W: ";
    ConvergenceTrace out;
    out.w_bps_per_w = w;
    out.start_id = start.id;
    out.trace = run_with_context(ctx.str(), g, cfg, demand, start.p, options.sca);
    return out;
  });
}

Statistic summarize(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty group");
  Statistic s;
  s.n = static_cast<int>(values.size());
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = std::clamp(sum / s.n, s.min, s.max);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
    s.std_error = s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

AggregateResult aggregate(std::vector<TrialRow> rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate: no rows (empty group)");
  std::sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
    return std::tuple_cat(group_key(a), std::make_tuple(a.trial_index, a.seed)) <
           std::tuple_cat(group_key(b), std::make_tuple(b.trial_index, b.seed));
  });

  AggregateResult out;
  for (std::size_t begin = 0; begin < rows.size();) {
    std::size_t end = begin;
    while (end < rows.size() && group_key(rows[end]) == group_key(rows[begin])) ++end;
    std::vector<double> usc, power, obj, iters;
    for (std::size_t i = begin; i < end; ++i) {
      usc.push_back(rows[i].usc_bps);
      power.push_back(rows[i].p_tot_w);
      obj.push_back(rows[i].objective);
      iters.push_back(rows[i].iterations);
    }
    AggregatePoint pt;
    pt.scheme = rows[begin].scheme;
    pt.w_bps_per_w = rows[begin].w_bps_per_w;
    pt.r_bps = rows[begin].r_bps;
    pt.usc_bps = summarize(usc);
    pt.p_tot_w = summarize(power);
    pt.objective = summarize(obj);
    pt.iterations = summarize(iters);
    out.points.push_back(std::move(pt));
    begin = end;
  }
  out.rows = std::move(rows);
  return out;
}

AggregateResult slope_sweep(const ExperimentSpec& spec, const RunOptions& options) {
  validate(spec);
  if (spec.r_grid_bps.empty()) throw std::invalid_argument("slope_sweep: empty r grid");
  const SystemConfig& base = spec.base_config;
  const int trials = spec.n_trials;
  const int n = static_cast<int>(spec.r_grid_bps.size()) * trials;

  auto per_task = parallel_map<std::vector<TrialRow>>(n, options.jobs, [&](int idx) {
    const double r = spec.r_grid_bps[idx / trials];
    const int trial = idx % trials;
    const std::uint64_t seed = spec.trial_seed(trial);
    const ChannelMatrix g = scene_channel(base, seed);
    const TrafficDemand demand = demand_from_slope(r, base.n_beams);

    std::vector<TrialRow> rows;
    SystemConfig cfg = base;
    cfg.weight_w_bps_per_watt = 0.0;
    const PowerAllocation start = upa(cfg);
    const MetricsReport m = evaluate(start, g, cfg, demand);
    TrialRow u;
    u.scheme = "upa";
    u.r_bps = r;
    u.trial_index = trial;
    u.seed = seed;
    u.usc_bps = m.usc_bps;
    u.p_tot_w = m.p_tot_w;
    u.objective = m.objective;
    rows.push_back(u);

    for (double w : spec.scheme_w_bps_per_w) {
      cfg.weight_w_bps_per_watt = w;
      const ScaTrace trace =
          run_with_context(trial_context(trial, seed, r, w), g, cfg, demand, start, options.sca);
      rows.push_back(sca_row(trace, cfg, w, r, trial, seed));
    }
    return rows;
  });

  std::vector<TrialRow> all;
  for (auto& v : per_task) all.insert(all.end(), v.begin(), v.end());
  return aggregate(std::move(all));
}

void validate_pareto_grid(const std::vector<double>& w_grid) {
  std::vector<double> w = w_grid;
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  if (w.size() < 5) throw std::invalid_argument("weight grid needs at least 5 distinct points");
  if (w.front() < 0.0) throw std::invalid_argument("weight grid entries must be >= 0");
  if (w.front() > 0.0 && w.back() < 1e3 * w.front()) {
    throw std::invalid_argument("weight grid must contain 0 or span at least three decades");
  }
}

std::vector<ParetoPoint> weight_sweep(const ExperimentSpec& spec, std::uint64_t scene_seed,
                                      double r_bps, const RunOptions& options) {
  validate(spec.base_config);
  validate_pareto_grid(spec.w_grid_bps_per_w);
  std::vector<double> grid = spec.w_grid_bps_per_w;
  std::sort(grid.begin(), grid.end());

  const ChannelMatrix g = scene_channel(spec.base_config, scene_seed);
  const TrafficDemand demand = demand_from_slope(r_bps, spec.base_config.n_beams);
  const PowerAllocation start = upa(spec.base_config);

  return parallel_map<ParetoPoint>(static_cast<int>(grid.size()), options.jobs, [&](int idx) {
    SystemConfig cfg = spec.base_config;
    cfg.weight_w_bps_per_watt = grid[idx];
    validate(cfg);
    std::ostringstream ctx;
    ctx << "scene seed " << scene_seed << ", w=" << shortest(grid[idx]) << " bps/W: ";
    const ScaTrace trace = run_with_context(ctx.str(), g, cfg, demand, start, options.sca);
    ParetoPoint pt;
    pt.w_bps_per_w = grid[idx];
    pt.usc_bps = trace.final_metrics.usc_bps;
    pt.p_tot_w = trace.final_metrics.p_tot_w;
    pt.objective = trace.final_metrics.objective;
    pt.iterations = trace.iterations;
    pt.converged = trace.converged;
    return pt;
  });
}

}  // namespace satopt
