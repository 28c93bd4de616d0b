#include "satopt/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace satopt {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

constexpr auto exp2_op = [](double v) { return std::exp2(v); };

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_slice(const VectorXd& y_k, const ChannelMatrix& g, int user, int sc) {
  if (y_k.size() != g.n_beams() || user < 0 || user >= g.n_beams() || sc < 0 ||
      sc >= g.n_subcarriers()) {
    throw std::invalid_argument("log-sum-exp term: index or slice size out of range");
  }
}

// log2 of (sum_j weight_j g_ji 2^{y_j} + sigma^2), max-shifted. weight is zeta
// for the direct term, 0 to drop it.
double lse2(const VectorXd& y_k, const ChannelMatrix& g, int user, int sc, double direct_weight) {
  const int n = g.n_beams();
  double exps[64];
  std::vector<double> heap;
  double* a = exps;
  if (n + 1 > 64) {
    heap.resize(n + 1);
    a = heap.data();
  }
  int count = 0;
  for (int j = 0; j < n; ++j) {
    const double scale = j == user ? direct_weight : 1.0;
    if (scale == 0.0) continue;
    a[count++] = std::log2(scale * g.gain(j, user, sc)) + y_k(j);
  }
  a[count++] = std::log2(g.noise(user, sc));
  const double top = *std::max_element(a, a + count);
  double s = 0.0;
  for (int c = 0; c < count; ++c) s += std::exp2(a[c] - top);
  return top + std::log2(s);
}

// The convex subproblem in solver units (Mbps, W), variables x = [y, t].
// Constraints c_j(x) <= 0 are ordered
//   [floor box (NK) | t >= 0 (N) | shortfall (N) | beam budget (N) | total]
class ConvexModel {
 public:
  ConvexModel(const ChannelMatrix& g, const SystemConfig& cfg, const TrafficDemand& demand,
              const LogPower& y_bar, double unit)
      : g_(g),
        n_(g.n_beams()),
        k_(g.n_subcarriers()),
        ny_(n_ * k_),
        nv_(ny_ + n_),
        nc_(ny_ + 3 * n_ + 1),
        bandwidth_(cfg.sc_bandwidth_hz / unit),
        weight_(cfg.weight_w_bps_per_watt / unit),
        p_beam_max_(cfg.p_beam_max_w),
        p_tot_max_(cfg.p_tot_max_w),
        y_floor_(std::log2(cfg.p_floor_w)),
        creq_(n_),
        lin_const_(VectorXd::Zero(n_)),
        lin_coef_(MatrixXd::Zero(n_, ny_)) {
    for (int i = 0; i < n_; ++i) creq_(i) = demand.c_req_bps[i] / unit;
    for (int k = 0; k < k_; ++k) {
      const VectorXd slice = y_bar.y.col(k);
      for (int i = 0; i < n_; ++i) {
        const double phi = phi_eval(slice, g, i, k, cfg.acm_zeta);
        const VectorXd grad = phi_gradient(slice, g, i, k, cfg.acm_zeta);
        lin_const_(i) += bandwidth_ * (phi - grad.dot(slice));
        for (int l = 0; l < n_; ++l) lin_coef_(i, yi(l, k)) += bandwidth_ * grad(l);
      }
    }
  }

  int n_vars() const { return nv_; }
  int n_constraints() const { return nc_; }
  int n_power_vars() const { return ny_; }
  int yi(int beam, int sc) const { return beam * k_ + sc; }
  int ti(int user) const { return ny_ + user; }
  double y_floor() const { return y_floor_; }
  double weight() const { return weight_; }

  int row_box(int v) const { return v; }
  int row_t(int i) const { return ny_ + i; }
  int row_short(int i) const { return ny_ + n_ + i; }
  int row_beam(int i) const { return ny_ + 2 * n_ + i; }
  int row_total() const { return ny_ + 3 * n_; }

  struct Eval {
    VectorXd p;
    MatrixXd q;  // q(i, l*K + k) = g_li p_lk / S_ik for l != i
    VectorXd c;
    MatrixXd jac;
    double objective = 0.0;
  };

  // Shortfall h_i(y) = creq_i - C~_i(y), without t.
  VectorXd shortfall(const VectorXd& x, const VectorXd& p) const {
    VectorXd h = creq_ - lin_const_ - lin_coef_ * x.head(ny_);
    for (int i = 0; i < n_; ++i) {
      double theta_sum = 0.0;
      for (int k = 0; k < k_; ++k) theta_sum += std::log2(interference(p, i, k));
      h(i) += bandwidth_ * theta_sum;
    }
    return h;
  }

  VectorXd powers(const VectorXd& x) const { return x.head(ny_).unaryExpr(exp2_op); }

  void evaluate(const VectorXd& x, Eval& e, bool with_jacobian) const {
    e.p = powers(x);
    e.c.resize(nc_);
    const VectorXd h = shortfall(x, e.p);
    double total = 0.0;
    for (int v = 0; v < ny_; ++v) e.c(row_box(v)) = y_floor_ - x(v);
    for (int i = 0; i < n_; ++i) {
      e.c(row_t(i)) = -x(ti(i));
      e.c(row_short(i)) = h(i) - x(ti(i));
      double beam = 0.0;
      for (int k = 0; k < k_; ++k) beam += e.p(yi(i, k));
      e.c(row_beam(i)) = beam - p_beam_max_;
      total += beam;
    }
    e.c(row_total()) = total - p_tot_max_;
    e.objective = x.tail(n_).sum() + weight_ * total;
    if (!with_jacobian) return;

    e.jac.setZero(nc_, nv_);
    e.q.setZero(n_, ny_);
    for (int v = 0; v < ny_; ++v) e.jac(row_box(v), v) = -1.0;
    for (int i = 0; i < n_; ++i) {
      e.jac(row_t(i), ti(i)) = -1.0;
      e.jac.row(row_short(i)).head(ny_) = -lin_coef_.row(i);
      e.jac(row_short(i), ti(i)) = -1.0;
      for (int k = 0; k < k_; ++k) {
        const double denom = interference(e.p, i, k);
        for (int l = 0; l < n_; ++l) {
          if (l == i) continue;
          const double ql = g_.gain(l, i, k) * e.p(yi(l, k)) / denom;
          e.q(i, yi(l, k)) = ql;
          e.jac(row_short(i), yi(l, k)) += bandwidth_ * ql;
        }
        const int v = yi(i, k);
        e.jac(row_beam(i), v) = kLn2 * e.p(v);
        e.jac(row_total(), v) = kLn2 * e.p(v);
      }
    }
  }

  VectorXd objective_gradient(const Eval& e) const {
    VectorXd grad(nv_);
    grad.head(ny_) = weight_ * kLn2 * e.p;
    grad.tail(n_).setOnes();
    return grad;
  }

  // Hessian of the Lagrangian F + lambda' c.
  void lagrangian_hessian(const Eval& e, const VectorXd& lambda, MatrixXd& hess) const {
    hess.setZero(nv_, nv_);
    const double l2 = kLn2 * kLn2;
    for (int i = 0; i < n_; ++i) {
      const double power_mult = lambda(row_beam(i)) + lambda(row_total());
      for (int k = 0; k < k_; ++k) {
        const int v = yi(i, k);
        hess(v, v) += l2 * e.p(v) * (weight_ + power_mult);
      }
    }
    for (int i = 0; i < n_; ++i) {
      const double curv = lambda(row_short(i)) * bandwidth_ * kLn2;
      if (curv == 0.0) continue;
      for (int k = 0; k < k_; ++k) {
        for (int l = 0; l < n_; ++l) {
          if (l == i) continue;
          const int vl = yi(l, k);
          const double ql = e.q(i, vl);
          hess(vl, vl) += curv * ql;
          for (int m = 0; m < n_; ++m) {
            if (m == i) continue;
            hess(vl, yi(m, k)) -= curv * ql * e.q(i, yi(m, k));
          }
        }
      }
    }
  }

 private:
  double interference(const VectorXd& p, int i, int k) const {
    double s = g_.noise(i, k);
    for (int j = 0; j < n_; ++j)
      if (j != i) s += g_.gain(j, i, k) * p(yi(j, k));
    return s;
  }

  const ChannelMatrix& g_;
  int n_, k_, ny_, nv_, nc_;
  double bandwidth_, weight_;
  double p_beam_max_, p_tot_max_, y_floor_;
  VectorXd creq_;
  VectorXd lin_const_;
  MatrixXd lin_coef_;
};

VectorXd initial_point(const ConvexModel& model, const SystemConfig& cfg, const LogPower& y_bar) {
  const int n = cfg.n_beams;
  const int k_count = cfg.n_subcarriers;
  const int ny = n * k_count;
  VectorXd x(model.n_vars());
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < k_count; ++k) x(model.yi(i, k)) = std::max(y_bar.y(i, k), model.y_floor());

  const VectorXd p = model.powers(x);
  bool tight = false;
  double total = 0.0;
  for (int v = 0; v < ny; ++v) tight |= !(x(v) > model.y_floor() + 1e-9);
  for (int i = 0; i < n; ++i) {
    double beam = 0.0;
    for (int k = 0; k < k_count; ++k) beam += p(model.yi(i, k));
    tight |= !(beam < cfg.p_beam_max_w * (1.0 - 1e-9));
    total += beam;
  }
  tight |= !(total < cfg.p_tot_max_w * (1.0 - 1e-9));
  if (tight) {
    // Blend towards a strictly interior point.
    const double inner = 0.5 * (cfg.p_floor_w + std::min(cfg.p_beam_max_w / k_count,
                                                         cfg.p_tot_max_w / (n * k_count)));
    for (int v = 0; v < ny; ++v) x(v) = std::log2(0.99 * std::exp2(x(v)) + 0.01 * inner);
  }
  const VectorXd h = model.shortfall(x, model.powers(x));
  for (int i = 0; i < n; ++i) x(model.ti(i)) = std::max(h(i), 0.0) + 1.0;
  return x;
}

constexpr double kMaxLog2Step = 1.0;
constexpr double kBoundary = 0.995;
constexpr double kNeighbourhood = 1e-3;
// Barrier phase ends once m / tau is this small relative to 1 + |F|.
constexpr double kSwitchGap = 1e-3;

// Largest alpha in (0, 1] keeping v + alpha dv >= 0.
double max_step(const VectorXd& v, const VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (dv(j) < 0.0) alpha = std::min(alpha, -v(j) / dv(j));
  }
  return alpha;
}

}  // namespace

LogPower to_log_power(const PowerAllocation& p, double p_floor_w) {
  return LogPower(p.p.array().max(p_floor_w).matrix().unaryExpr([](double v) { return std::log2(v); }));
}

PowerAllocation to_power(const LogPower& y) { return PowerAllocation(y.y.unaryExpr(exp2_op)); }

double phi_eval(const VectorXd& y_k, const ChannelMatrix& g, int user, int sc, double zeta) {
  check_slice(y_k, g, user, sc);
  return lse2(y_k, g, user, sc, zeta);
}

double theta_eval(const VectorXd& y_k, const ChannelMatrix& g, int user, int sc) {
  check_slice(y_k, g, user, sc);
  return lse2(y_k, g, user, sc, 0.0);
}

VectorXd phi_gradient(const VectorXd& y_k, const ChannelMatrix& g, int user, int sc, double zeta) {
  check_slice(y_k, g, user, sc);
  const int n = g.n_beams();
  VectorXd a(n);
  for (int j = 0; j < n; ++j) {
    const double scale = j == user ? zeta : 1.0;
    a(j) = std::log2(scale * g.gain(j, user, sc)) + y_k(j);
  }
  const double noise = std::log2(g.noise(user, sc));
  const double top = std::max(a.maxCoeff(), noise);
  VectorXd w = (a.array() - top).matrix().unaryExpr(exp2_op);
  const double denom = w.sum() + std::exp2(noise - top);
  return w / denom;
}

DCParts dc_parts(const LogPower& y, const ChannelMatrix& g, double zeta) {
  DCParts parts{MatrixXd(g.n_beams(), g.n_subcarriers()), MatrixXd(g.n_beams(), g.n_subcarriers())};
  for (int k = 0; k < g.n_subcarriers(); ++k) {
    const VectorXd slice = y.y.col(k);
    for (int i = 0; i < g.n_beams(); ++i) {
      parts.phi(i, k) = phi_eval(slice, g, i, k, zeta);
      parts.theta(i, k) = theta_eval(slice, g, i, k);
    }
  }
  return parts;
}

double linearize_capacity(const LogPower& y, const LogPower& y_bar, const ChannelMatrix& g,
                          const SystemConfig& cfg, int user) {
  double bits = 0.0;
  for (int k = 0; k < g.n_subcarriers(); ++k) {
    const VectorXd slice = y.y.col(k);
    const VectorXd bar = y_bar.y.col(k);
    // phi(y_bar) - theta(y) = log2(1 + num / den) with the interference change
    // formed directly, so at y == y_bar it reduces to log2(1 + sinr) without
    // cancellation between two large logarithms.
    double num = cfg.acm_zeta * g.gain(user, user, k) * std::exp2(bar(user));
    double den = g.noise(user, k);
    for (int j = 0; j < g.n_beams(); ++j) {
      if (j == user) continue;
      const double pj = std::exp2(slice(j));
      den += g.gain(j, user, k) * pj;
      num -= g.gain(j, user, k) * std::exp2(bar(j)) * std::expm1((slice(j) - bar(j)) * kLn2);
    }
    double gap = std::log1p(num / den) / kLn2;
    if (!std::isfinite(gap)) gap = phi_eval(bar, g, user, k, cfg.acm_zeta) - theta_eval(slice, g, user, k);
    bits += gap + phi_gradient(bar, g, user, k, cfg.acm_zeta).dot(slice - bar);
  }
  return cfg.sc_bandwidth_hz * bits;
}

SubproblemSolution solve_subproblem(const ChannelMatrix& g, const SystemConfig& cfg,
                                    const TrafficDemand& demand, const LogPower& y_bar,
                                    const SubproblemOptions& opt) {
  const int n = g.n_beams();
  const int k_count = g.n_subcarriers();
  if (cfg.n_beams != n || cfg.n_subcarriers != k_count || y_bar.y.rows() != n ||
      y_bar.y.cols() != k_count || static_cast<int>(demand.c_req_bps.size()) != n) {
    throw std::invalid_argument("solve_subproblem: inconsistent dimensions");
  }

  const ConvexModel model(g, cfg, demand, y_bar, opt.capacity_unit_bps);
  const int nv = model.n_vars();
  const int nc = model.n_constraints();
  const int ny = model.n_power_vars();

  SubproblemSolution sol;
  VectorXd x = initial_point(model, cfg, y_bar);
  ConvexModel::Eval ev;
  model.evaluate(x, ev, true);

  MatrixXd hess(nv, nv);
  VectorXd scale;
  Eigen::LLT<MatrixXd> llt;
  // Factorises H + J' diag(lambda / s) J with Jacobi scaling, which keeps
  // the Cholesky accurate as slacks shrink.
  auto factorise = [&](const ConvexModel::Eval& e, const VectorXd& s, const VectorXd& lambda) {
    model.lagrangian_hessian(e, lambda, hess);
    const VectorXd d = lambda.cwiseQuotient(s);
    hess.noalias() += e.jac.transpose() * d.asDiagonal() * e.jac;
    scale = hess.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const MatrixXd scaled = scale.asDiagonal() * hess * scale.asDiagonal();
    llt.compute(scaled);
    double shift = 0.0;
    while (llt.info() != Eigen::Success) {
      shift = shift == 0.0 ? 1e-14 : shift * 10.0;
      llt.compute(scaled + shift * MatrixXd::Identity(nv, nv));
    }
    ++sol.barrier_iterations;
  };
  auto solve = [&](const VectorXd& rhs) -> VectorXd {
    return scale.asDiagonal() * llt.solve(scale.asDiagonal() * rhs);
  };
  // Largest step along dx that moves no power by more than 2^kMaxLog2Step.
  auto cap_step = [&](const VectorXd& dx, double alpha) {
    const double y_move = dx.head(ny).lpNorm<Eigen::Infinity>();
    return alpha * y_move > kMaxLog2Step ? kMaxLog2Step / y_move : alpha;
  };

  VectorXd r_d, r_p, grad_f;
  auto residuals = [&](const ConvexModel::Eval& e, const VectorXd& sl, const VectorXd& lam) {
    r_d = model.objective_gradient(e) + e.jac.transpose() * lam;
    r_p = e.c + sl;
  };
  auto merit = [&](const ConvexModel::Eval& e, const VectorXd& sl, const VectorXd& lam, double target) {
    const VectorXd rd = model.objective_gradient(e) + e.jac.transpose() * lam;
    const VectorXd rp = e.c + sl;
    const VectorXd rc = (sl.array() * lam.array() - target).matrix();
    return rd.squaredNorm() + rp.squaredNorm() + rc.squaredNorm();
  };
  struct Certificate {
    double primal = 0.0, dual = 0.0, complementarity = 0.0, gap = 0.0;
    double kkt() const { return primal + dual + complementarity; }
  };
  auto measure = [&](const ConvexModel::Eval& e, const VectorXd& sl, const VectorXd& lam) {
    residuals(e, sl, lam);
    grad_f = model.objective_gradient(e);
    Certificate c;
    c.dual = r_d.lpNorm<Eigen::Infinity>() / (1.0 + grad_f.lpNorm<Eigen::Infinity>());
    c.primal = std::max(r_p.lpNorm<Eigen::Infinity>(), std::max(e.c.maxCoeff(), 0.0));
    c.gap = sl.dot(lam);
    c.complementarity = c.gap / (1.0 + std::abs(e.objective));
    return c;
  };
  const double inner_tol = 1e-3 * opt.kkt_tolerance;
  auto done = [&](const Certificate& c) {
    return c.dual <= inner_tol && c.primal <= inner_tol && c.gap < opt.gap_tolerance;
  };

  // Log-barrier path following on tau F - sum log(-c). Scaled by 1/tau, the
  // Newton system is the primal-dual one with lambda = 1/(tau s).
  // Start where the barrier and tau F are of comparable size.
  double tau = nc / (1.0 + std::abs(ev.objective));
  bool newton_limit = false;
  auto barrier_value = [&](const ConvexModel::Eval& e) {
    return tau * e.objective - (-e.c.array()).log().sum();
  };
  auto centre_stage = [&]() {
    ++sol.barrier_stages;
    for (int step = 0; step < opt.max_newton_per_stage; ++step) {
      const VectorXd s = -ev.c;
      const VectorXd lambda = (tau * s).cwiseInverse();
      factorise(ev, s, lambda);
      const VectorXd grad = model.objective_gradient(ev) + ev.jac.transpose() * lambda;
      const VectorXd dx = solve(-grad);
      const double slope = tau * grad.dot(dx);
      if (-0.5 * slope <= opt.newton_tolerance) return;

      const double phi0 = barrier_value(ev);
      double alpha = cap_step(dx, 1.0);
      ConvexModel::Eval trial;
      for (;;) {
        if (alpha < 1e-14) return;  // centred to round-off
        model.evaluate(x + alpha * dx, trial, true);
        if (trial.c.maxCoeff() < 0.0 &&
            barrier_value(trial) <= phi0 + opt.armijo_alpha * alpha * slope) {
          break;
        }
        alpha *= opt.backtrack_beta;
      }
      x += alpha * dx;
      ev = std::move(trial);
    }
    newton_limit = true;
  };

  // Infeasible primal-dual Newton from a centred point: drives the
  // certificate to round-off without forming 1/(tau s). Works on copies.
  VectorXd best_x = x;
  Certificate best;
  best.primal = std::numeric_limits<double>::infinity();
  auto polish = [&]() {
    VectorXd xp = x;
    ConvexModel::Eval ep = ev;
    VectorXd s = -ep.c;
    VectorXd lambda = (tau * s).cwiseInverse();
    Certificate cert = measure(ep, s, lambda);
    if (cert.kkt() < best.kkt()) {
      best = cert;
      best_x = xp;
    }
    for (int it = 0; it < opt.max_polish_iterations && !done(cert); ++it) {
      const double mu = cert.gap / nc;
      factorise(ep, s, lambda);
      const VectorXd d = lambda.cwiseQuotient(s);

      VectorXd dx, ds, dl;
      auto direction = [&](const VectorXd& rc) {
        dx = solve(-r_d - ep.jac.transpose() * (d.cwiseProduct(r_p) - rc.cwiseQuotient(s)));
        ds = -r_p - ep.jac * dx;
        dl = -(rc + lambda.cwiseProduct(ds)).cwiseQuotient(s);
      };

      // Predictor, then Mehrotra corrector with a centring floor that keeps
      // mu from collapsing ahead of the residuals.
      VectorXd rc = s.cwiseProduct(lambda);
      direction(rc);
      const double a_aff = std::min(max_step(s, ds), max_step(lambda, dl));
      const double mu_aff = (s + a_aff * ds).dot(lambda + a_aff * dl) / nc;
      const double infeas = std::max(r_p.lpNorm<Eigen::Infinity>(), r_d.lpNorm<Eigen::Infinity>());
      const double centre = std::max(std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0) * mu,
                                     0.1 * std::min(mu, infeas));
      rc += (ds.cwiseProduct(dl).array() - centre).matrix();
      direction(rc);

      bool accepted = false;
      for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
        const double target = attempt == 0 ? centre : 0.5 * mu;
        if (attempt == 1) direction((s.cwiseProduct(lambda).array() - target).matrix());
        const double m0 = merit(ep, s, lambda, target);
        double alpha =
            cap_step(dx, std::min(1.0, kBoundary * std::min(max_step(s, ds), max_step(lambda, dl))));
        ConvexModel::Eval trial;
        for (; alpha > 1e-12; alpha *= opt.backtrack_beta) {
          const VectorXd st = s + alpha * ds;
          const VectorXd lt = lambda + alpha * dl;
          const VectorXd comp = st.cwiseProduct(lt);
          if (comp.minCoeff() < kNeighbourhood * comp.sum() / nc) continue;
          model.evaluate(xp + alpha * dx, trial, true);
          const double mt = merit(trial, st, lt, target);
          if (std::isfinite(mt) && mt <= (1.0 - opt.armijo_alpha * alpha) * m0) {
            xp += alpha * dx;
            s = st;
            lambda = lt;
            ep = std::move(trial);
            accepted = true;
            break;
          }
        }
      }
      if (!accepted) return false;
      cert = measure(ep, s, lambda);
      if (cert.kkt() < best.kkt()) {
        best = cert;
        best_x = xp;
      }
    }
    return done(cert);
  };

  // Follow the path to a moderate gap and polish; if polishing stalls,
  // follow the path further and try again.
  double switch_gap = kSwitchGap;
  for (;;) {
    do {
      centre_stage();
      if (newton_limit || nc / tau <= switch_gap * (1.0 + std::abs(ev.objective))) break;
      tau *= opt.barrier_growth;
    } while (true);
    if (polish() || newton_limit || nc / tau <= opt.gap_tolerance) break;
    switch_gap *= 1e-3;
    tau *= opt.barrier_growth;
  }

  x = best_x;
  sol.primal_residual = best.primal;
  sol.dual_residual = best.dual;
  sol.complementarity = best.complementarity;
  sol.kkt_residual = best.kkt();
  sol.converged = sol.kkt_residual <= opt.kkt_tolerance;
  if (!sol.converged) {
    sol.message = newton_limit ? "Newton iteration limit reached in a barrier stage"
                               : "interior-point iterations stalled";
    sol.message += " with KKT residual above tolerance";
  }

  // Snap round-off excursions back into the box and budgets, then take the
  // best t for that y: the clamped shortfall of the linear model.
  VectorXd y = x.head(ny).cwiseMax(model.y_floor());
  VectorXd p = model.powers(y);
  for (int i = 0; i < n; ++i) {
    double beam = 0.0;
    for (int k = 0; k < k_count; ++k) beam += p(model.yi(i, k));
    if (beam > cfg.p_beam_max_w) {
      for (int k = 0; k < k_count; ++k) y(model.yi(i, k)) -= std::log2(beam / cfg.p_beam_max_w);
    }
  }
  p = model.powers(y);
  if (p.sum() > cfg.p_tot_max_w) y.array() -= std::log2(p.sum() / cfg.p_tot_max_w);
  y = y.cwiseMax(model.y_floor());
  VectorXd xs(nv);
  xs.head(ny) = y;
  xs.tail(n).setZero();
  p = model.powers(xs);
  const VectorXd h = model.shortfall(xs, p);

  sol.y_star.y.resize(n, k_count);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < k_count; ++k) sol.y_star.y(i, k) = y(model.yi(i, k));
  sol.t_star.t.resize(n);
  double t_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = std::max(h(i), 0.0);
    sol.t_star.t(i) = t * opt.capacity_unit_bps;
    t_sum += t;
  }
  sol.objective_value = (t_sum + model.weight() * p.sum()) * opt.capacity_unit_bps;
  return sol;
}

}  // namespace satopt
