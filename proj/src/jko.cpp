#include "crossflow/jko.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crossflow/error.hpp"
#include "crossflow/transport.hpp"

namespace crossflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Rebuild the absorbed kernel once a scaling exponent drifts this far.
constexpr double kAbsorbLimit = 30.0;

double log_sum_exp(const double* v, std::size_t count) {
  double m = -kInf;
  for (std::size_t k = 0; k < count; ++k) m = std::max(m, v[k]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t k = 0; k < count; ++k) s += std::exp(v[k] - m);
  return m + std::log(s);
}

// Per-cell proximal problem in log-density variables:
//   G1 = la - tr + c f_a(a, b) = 0,  G2 = lb - tm + c f_b(a, b) = 0,
// where tr, tm are the log targets (log xi - log h).
class ProxCell {
 public:
  ProxCell(const EnvelopeOracle& oracle, double c, double tol) : oracle_(oracle), c_(c), tol_(tol) {}

  // Returns true when the Newton path failed and bisection was used.
  bool solve(int cell, double tr, double tm, double& la, double& lb) const {
    if (tr == -kInf || tm == -kInf) {
      // One species vanishes; the other solves log b + c (log b + 1) = tm.
      la = tr == -kInf ? -kInf : (tr - c_) / (1.0 + c_);
      lb = tm == -kInf ? -kInf : (tm - c_) / (1.0 + c_);
      return false;
    }
    if (!std::isfinite(la) || !std::isfinite(lb)) {
      la = (tr - c_) / (1.0 + c_);
      lb = (tm - c_) / (1.0 + c_);
    }
    if (newton(tr, tm, la, lb)) return false;
    gauss_seidel(cell, tr, tm, la, lb);
    return true;
  }

 private:
  struct Eval {
    double g1, g2, merit;
    PointEval e;
  };

  Eval eval(double tr, double tm, double la, double lb) const {
    Eval r;
    r.e = oracle_.evaluate_log(la, lb);
    r.g1 = la - tr + c_ * r.e.fa;
    r.g2 = lb - tm + c_ * r.e.fb;
    r.merit = 0.5 * (r.g1 * r.g1 + r.g2 * r.g2);
    return r;
  }

  double scale(double tr, double tm, const Eval& r) const {
    return 1.0 + std::abs(tr) + std::abs(tm) + c_ * (std::abs(r.e.fa) + std::abs(r.e.fb));
  }

  bool newton(double tr, double tm, double& la, double& lb) const {
    Eval cur = eval(tr, tm, la, lb);
    for (int it = 0; it < 60; ++it) {
      if (std::max(std::abs(cur.g1), std::abs(cur.g2)) <= tol_ * scale(tr, tm, cur)) return true;
      const double a = std::exp(la);
      const double b = std::exp(lb);
      double j11, j12, j21, j22;
      if (cur.e.region == Region::A) {
        const double k = c_ * cur.e.curvature;
        j11 = 1.0 + k * a;
        j12 = k * b;
        j21 = k * a;
        j22 = 1.0 + k * b;
      } else {
        j11 = 1.0 + c_;
        j12 = c_ * b;
        j21 = c_ * a;
        j22 = 1.0 + c_;
      }
      const double det = j11 * j22 - j12 * j21;
      double d1 = -(j22 * cur.g1 - j12 * cur.g2) / det;
      double d2 = -(-j21 * cur.g1 + j11 * cur.g2) / det;
      const double big = std::max(std::abs(d1), std::abs(d2));
      if (big > 5.0) {
        d1 *= 5.0 / big;
        d2 *= 5.0 / big;
      }
      double t = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        const Eval trial = eval(tr, tm, la + t * d1, lb + t * d2);
        if (trial.merit <= (1.0 - 1e-4 * t) * cur.merit) {
          la += t * d1;
          lb += t * d2;
          cur = trial;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) {
        // At rounding level no step decreases the merit; accept if small.
        return std::max(std::abs(cur.g1), std::abs(cur.g2)) <= 1e3 * tol_ * scale(tr, tm, cur);
      }
    }
    return false;
  }

  // Root of a strictly increasing function of one log variable.
  template <class G>
  static double bisect(G&& g, double x0) {
    double lo = x0 - 1.0;
    double hi = x0 + 1.0;
    double step = 1.0;
    while (g(lo) > 0.0 && step < 1e4) {
      step *= 2.0;
      lo = x0 - step;
    }
    step = 1.0;
    while (g(hi) < 0.0 && step < 1e4) {
      step *= 2.0;
      hi = x0 + step;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  void gauss_seidel(int cell, double tr, double tm, double& la, double& lb) const {
    for (int sweep = 0; sweep < 2000; ++sweep) {
      const double la_old = la;
      const double lb_old = lb;
      la = bisect([&](double x) { return eval(tr, tm, x, lb).g1; }, la);
      lb = bisect([&](double x) { return eval(tr, tm, la, x).g2; }, lb);
      if (std::abs(la - la_old) + std::abs(lb - lb_old) < 1e-13 * (1.0 + std::abs(la) + std::abs(lb))) {
        const Eval r = eval(tr, tm, la, lb);
        if (std::max(std::abs(r.g1), std::abs(r.g2)) <= 1e3 * tol_ * scale(tr, tm, r)) return;
      }
    }
    throw ProxFailure("per-cell proximal solve did not converge", cell, la, lb);
  }

  const EnvelopeOracle& oracle_;
  double c_;
  double tol_;
};

// One species of the scaling iteration, restricted to supported rows.
struct Species {
  std::vector<int> rows;
  std::vector<double> log_a;  // log of row masses
  std::vector<double> a;
  std::vector<double> phi;    // row log potentials
  std::vector<double> psi;    // column log potentials (all n cells)
  std::vector<double> Phi;    // absorbed parts
  std::vector<double> Psi;
  std::vector<double> kern;   // rows x n absorbed kernel
  std::vector<int> lo, hi;    // per row, the index range holding non-negligible entries
  std::vector<double> u;      // exp(phi - Phi)
  std::vector<double> v;      // exp(psi - Psi)
  std::vector<double> lxi;    // log (K^T e^phi)

  void init(const Density& d) {
    const int n = d.grid.n_cells;
    const double m = d.mass();
    for (int i = 0; i < n; ++i) {
      if (d.values[i] > 0.0) {
        rows.push_back(i);
        a.push_back(d.values[i] * d.grid.h() / m);
        log_a.push_back(std::log(a.back()));
      }
    }
    phi.assign(rows.size(), 0.0);
    Phi.assign(rows.size(), 0.0);
    u.assign(rows.size(), 1.0);
    psi.assign(n, 0.0);
    Psi.assign(n, 0.0);
    v.assign(n, 1.0);
    lxi.assign(n, 0.0);
    kern.assign(rows.size() * n, 0.0);
    lo.assign(rows.size(), 0);
    hi.assign(rows.size(), n);
  }

  void absorb(const std::vector<double>& log_kernel, int n) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Phi[r] = phi[r];
      u[r] = 1.0;
    }
    for (int j = 0; j < n; ++j) {
      Psi[j] = std::isfinite(psi[j]) ? psi[j] : 0.0;
      v[j] = std::isfinite(psi[j]) ? 1.0 : 0.0;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double* lk = &log_kernel[static_cast<std::size_t>(rows[r]) * n];
      double* kr = &kern[r * n];
      double top = 0.0;
      for (int j = 0; j < n; ++j) {
        kr[j] = std::exp(lk[j] + Phi[r] + Psi[j]);
        top = std::max(top, kr[j]);
      }
      // Entries below 1e-40 of the row maximum are dropped from the products.
      const double cut = 1e-40 * top;
      int first = 0;
      int last = n;
      while (first < n && kr[first] < cut) ++first;
      while (last > first && kr[last - 1] < cut) --last;
      lo[r] = first;
      hi[r] = last;
    }
  }

  bool drifted() const {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (std::abs(phi[r] - Phi[r]) > kAbsorbLimit) return true;
    }
    for (std::size_t j = 0; j < psi.size(); ++j) {
      if (std::isfinite(psi[j]) && std::abs(psi[j] - Psi[j]) > kAbsorbLimit) return true;
    }
    return false;
  }

  // Row projection.  Returns the L1 row-marginal error of the plan before it.
  double project_rows(const std::vector<double>& log_kernel, int n, std::vector<double>& scratch) {
    double err = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double* kr = &kern[r * n];
      double kv = 0.0;
      for (int j = lo[r]; j < hi[r]; ++j) kv += kr[j] * v[j];
      double log_kv;  // log (K e^psi)_i
      if (kv > 1e-200 && std::isfinite(kv)) {
        log_kv = std::log(kv) - Phi[r];
      } else {
        const double* lk = &log_kernel[static_cast<std::size_t>(rows[r]) * n];
        for (int j = 0; j < n; ++j) scratch[j] = lk[j] + psi[j];
        log_kv = log_sum_exp(scratch.data(), n);
      }
      err += std::abs(a[r] - std::exp(phi[r] + log_kv));
      phi[r] = log_a[r] - log_kv;
      u[r] = std::exp(phi[r] - Phi[r]);
    }
    return err;
  }

  // lxi_j = log sum_i K_ij e^{phi_i}.
  void column_sums(const std::vector<double>& log_kernel, int n, std::vector<double>& scratch) {
    std::vector<double> ktu(n, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double* kr = &kern[r * n];
      const double ur = u[r];
      for (int j = lo[r]; j < hi[r]; ++j) ktu[j] += kr[j] * ur;
    }
    for (int j = 0; j < n; ++j) {
      if (ktu[j] > 1e-200 && std::isfinite(ktu[j])) {
        lxi[j] = std::log(ktu[j]) - Psi[j];
      } else {
        for (std::size_t r = 0; r < rows.size(); ++r) {
          scratch[r] = log_kernel[static_cast<std::size_t>(rows[r]) * n + j] + phi[r];
        }
        lxi[j] = log_sum_exp(scratch.data(), rows.size());
      }
    }
  }

  void set_column(int j, double log_p) {
    psi[j] = log_p - lxi[j];
    v[j] = std::isfinite(psi[j]) ? std::exp(psi[j] - Psi[j]) : 0.0;
  }
};

std::vector<double> primitive(const std::vector<double>& grad, double h) {
  std::vector<double> out(grad.size(), 0.0);
  for (std::size_t i = 1; i < grad.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (grad[i - 1] + grad[i]);
  return out;
}

double optimality_residual(const Density& d, const std::vector<double>& fa,
                           const std::vector<double>& grad, double tau_eff, double floor) {
  const std::vector<double> phi = primitive(grad, d.grid.h());
  double w = 0.0, mean = 0.0;
  double lo = kInf, hi = -kInf;
  for (int i = 0; i < d.size(); ++i) {
    if (d.values[i] <= floor) continue;
    const double q = fa[i] + phi[i] / tau_eff;
    w += d.values[i];
    mean += d.values[i] * q;
    lo = std::min(lo, fa[i]);
    hi = std::max(hi, fa[i]);
  }
  if (w == 0.0) return 0.0;
  mean /= w;
  double var = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    if (d.values[i] <= floor) continue;
    const double q = fa[i] + phi[i] / tau_eff - mean;
    var += d.values[i] * q * q;
  }
  const double sd = std::sqrt(var / w);
  const double range = hi - lo;
  return range > 0.0 ? sd / range : sd;
}

}  // namespace

void validate(const JkoConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw DomainError("tau must be positive");
  if (!(cfg.eps_reg > 0.0)) throw DomainError("eps_reg must be positive");
  if (!(cfg.prox_newton_tol > 0.0) || !(cfg.scaling_tol > 0.0)) {
    throw DomainError("solver tolerances must be positive");
  }
  if (cfg.max_scaling_iter < 1) throw DomainError("max_scaling_iter must be at least 1");
}

JkoSolver::JkoSolver(const Grid1D& grid, const JkoConfig& cfg, const EnvelopeOracle& oracle)
    : grid_(grid), cfg_(cfg), oracle_(&oracle) {
  validate(cfg_);
  const int n = grid_.n_cells;
  const double eps = cfg_.eps_reg;
  log_kernel_.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = grid_.center(i) - grid_.center(j);
      log_kernel_[static_cast<std::size_t>(i) * n + j] = -d * d / eps;
    }
  }
  // Symmetric scaling D K D with unit row sums: ld <- (ld - log(K e^ld)) / 2.
  std::vector<double> ld(n, 0.0);
  std::vector<double> scratch(n);
  for (int it = 0; it < 10000; ++it) {
    double worst = 0.0;
    std::vector<double> next(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) scratch[j] = log_kernel_[static_cast<std::size_t>(i) * n + j] + ld[j];
      const double row = ld[i] + log_sum_exp(scratch.data(), n);
      worst = std::max(worst, std::abs(row));
      next[i] = 0.5 * (ld[i] + ld[i] - row);
    }
    ld = std::move(next);
    if (worst < 1e-14) break;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) log_kernel_[static_cast<std::size_t>(i) * n + j] += ld[i] + ld[j];
  }
}

void JkoSolver::reset() {
  la_.clear();
  lb_.clear();
  psi_rho_.clear();
  psi_mu_.clear();
  last_c_ = 0.0;
}

StepResult JkoSolver::step(const DensityPair& anchor, double s) {
  if (!(s > 0.0 && s <= 1.0)) {
    std::ostringstream msg;
    msg << "De Giorgi parameter must lie in (0, 1], got " << s;
    throw DomainError(msg.str());
  }
  validate(anchor, 1e-10);
  if (!(anchor.grid() == grid_)) throw GridMismatch("anchor grid differs from solver grid");

  const int n = grid_.n_cells;
  const double h = grid_.h();
  const double log_h = std::log(h);
  const double tau_eff = s * cfg_.tau;
  const double c = 2.0 * tau_eff / cfg_.eps_reg;

  Species sr, sm;
  sr.init(anchor.rho);
  sm.init(anchor.mu);
  if (static_cast<int>(la_.size()) == n) {
    // Column potentials scale like -c f_a at the solution.
    const double ratio = c / last_c_;
    for (int j = 0; j < n; ++j) {
      sr.psi[j] = psi_rho_[j] * ratio;
      sm.psi[j] = psi_mu_[j] * ratio;
    }
  } else {
    la_.assign(n, kInf);
    lb_.assign(n, kInf);
  }

  const ProxCell prox(*oracle_, c, cfg_.prox_newton_tol);
  std::vector<double> scratch(n);
  StepResult out;
  sr.absorb(log_kernel_, n);
  sm.absorb(log_kernel_, n);
  std::vector<double> log_p(n), log_q(n);

  double err = kInf;
  int it = 0;
  for (; it < cfg_.max_scaling_iter; ++it) {
    err = sr.project_rows(log_kernel_, n, scratch) + sm.project_rows(log_kernel_, n, scratch);
    if (it > 0 && err < cfg_.scaling_tol) break;
    sr.column_sums(log_kernel_, n, scratch);
    sm.column_sums(log_kernel_, n, scratch);
    for (int j = 0; j < n; ++j) {
      double la = la_[j];
      double lb = lb_[j];
      if (prox.solve(j, sr.lxi[j] - log_h, sm.lxi[j] - log_h, la, lb)) ++out.prox_fallbacks;
      la_[j] = la;
      lb_[j] = lb;
      log_p[j] = la + log_h;
      log_q[j] = lb + log_h;
      sr.set_column(j, log_p[j]);
      sm.set_column(j, log_q[j]);
    }
    if (sr.drifted() || sm.drifted()) {
      sr.absorb(log_kernel_, n);
      sm.absorb(log_kernel_, n);
      ++out.kernel_rebuilds;
    }
  }
  out.scaling_iterations = it;
  out.marginal_error = err;
  if (!(err < cfg_.scaling_tol)) {
    std::ostringstream msg;
    msg << "scaling iteration reached " << cfg_.max_scaling_iter
        << " iterations with marginal error " << err;
    throw ConvergenceError(msg.str(), err);
  }
  psi_rho_ = sr.psi;
  psi_mu_ = sm.psi;
  last_c_ = c;

  std::vector<double> rho(n), mu(n);
  for (int j = 0; j < n; ++j) {
    rho[j] = std::exp(la_[j]);
    mu[j] = std::exp(lb_[j]);
  }
  out.next = DensityPair{normalized(grid_, std::move(rho)), normalized(grid_, std::move(mu))};
  out.tau_eff = tau_eff;

  const TransportResult tr = quantile_w2(out.next.rho, anchor.rho);
  const TransportResult tm = quantile_w2(out.next.mu, anchor.mu);
  out.w2sq_rho = tr.w2_squared;
  out.w2sq_mu = tm.w2_squared;
  out.potential_grad_rho = tr.potential_grad;
  out.potential_grad_mu = tm.potential_grad;

  std::vector<double> fa(n), fb(n);
  for (int j = 0; j < n; ++j) {
    const PointEval e = oracle_->evaluate(out.next.rho.values[j], out.next.mu.values[j]);
    fa[j] = e.fa;
    fb[j] = e.fb;
  }
  const double floor = cfg_.mass_floor(grid_);
  out.optimality_residual_rho = optimality_residual(out.next.rho, fa, tr.potential_grad, tau_eff, floor);
  out.optimality_residual_mu = optimality_residual(out.next.mu, fb, tm.potential_grad, tau_eff, floor);
  return out;
}

StepResult jko_step(const DensityPair& current, const JkoConfig& cfg, const EnvelopeOracle& oracle) {
  JkoSolver solver(current.grid(), cfg, oracle);
  return solver.step(current, 1.0);
}

StepResult de_giorgi_step(const DensityPair& anchor, double s, const JkoConfig& cfg,
                          const EnvelopeOracle& oracle) {
  JkoSolver solver(anchor.grid(), cfg, oracle);
  return solver.step(anchor, s);
}

std::vector<double> default_dg_nodes() {
  std::vector<double> nodes;
  for (int k = 1; k <= 8; ++k) nodes.push_back(k / 8.0);
  return nodes;
}

Trajectory run_trajectory(const DensityPair& init, const JkoConfig& cfg,
                          const EnvelopeOracle& oracle, int n_steps,
                          const std::vector<double>& dg_nodes) {
  if (n_steps < 0) throw DomainError("n_steps must be nonnegative");
  std::vector<double> nodes = dg_nodes;
  std::sort(nodes.begin(), nodes.end());
  for (double s : nodes) {
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("De Giorgi nodes must lie in (0, 1]");
  }
  Trajectory traj;
  traj.initial = init;
  traj.tau = cfg.tau;
  traj.dg_nodes = nodes;
  JkoSolver solver(init.grid(), cfg, oracle);
  for (int k = 0; k < n_steps; ++k) {
    const DensityPair& anchor = traj.iterate(k);
    try {
      std::vector<StepResult> samples;
      std::optional<StepResult> full;
      for (double s : nodes) {
        samples.push_back(solver.step(anchor, s));
        if (s == 1.0) full = samples.back();
      }
      if (!full) full = solver.step(anchor, 1.0);
      std::vector<double> v(full->potential_grad_rho), w(full->potential_grad_mu);
      for (double& x : v) x /= cfg.tau;
      for (double& x : w) x /= cfg.tau;
      traj.steps.push_back(std::move(*full));
      traj.de_giorgi.push_back(std::move(samples));
      traj.velocity_rho.push_back(std::move(v));
      traj.velocity_mu.push_back(std::move(w));
    } catch (const Error& e) {
      traj.failure = StepFailure{k, e.code(), e.what()};
      break;
    }
  }
  return traj;
}

Interpolated interpolate(const Trajectory& traj, double t, InterpolationKind kind) {
  const double T = traj.n_steps() * traj.tau;
  if (!(t >= 0.0 && t <= T * (1.0 + 1e-12))) {
    std::ostringstream msg;
    msg << "interpolation time " << t << " outside [0, " << T << "]";
    throw DomainError(msg.str());
  }
  Interpolated out;
  if (traj.n_steps() == 0 || t == 0.0) {
    out.pair = traj.initial;
    return out;
  }
  // Interval ((k-1) tau, k tau] with fractional position frac in (0, 1].
  const double x = t / traj.tau;
  int k = static_cast<int>(std::ceil(x - 1e-12));
  k = std::clamp(k, 1, traj.n_steps());
  const double frac = std::clamp(x - (k - 1), 0.0, 1.0);
  switch (kind) {
    case InterpolationKind::constant:
      out.pair = traj.iterate(k);
      break;
    case InterpolationKind::geodesic: {
      const DensityPair& a = traj.iterate(k - 1);
      const DensityPair& b = traj.iterate(k);
      out.pair = DensityPair{displacement_interpolate(a.rho, b.rho, frac),
                             displacement_interpolate(a.mu, b.mu, frac)};
      break;
    }
    case InterpolationKind::de_giorgi: {
      const auto& nodes = traj.dg_nodes;
      if (nodes.empty()) throw DomainError("trajectory has no De Giorgi samples");
      std::size_t best = 0;
      for (std::size_t m = 1; m < nodes.size(); ++m) {
        if (std::abs(nodes[m] - frac) < std::abs(nodes[best] - frac)) best = m;
      }
      out.nearest_node = std::abs(nodes[best] - frac) > 1e-9;
      out.pair = traj.de_giorgi[k - 1][best].next;
      break;
    }
  }
  return out;
}

}  // namespace crossflow
