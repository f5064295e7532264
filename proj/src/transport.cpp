#include "crossflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crossflow/error.hpp"

namespace crossflow {

namespace {

void check_pair(const Density& source, const Density& target) {
  if (!(source.grid == target.grid)) {
    throw GridMismatch("transport endpoints live on different grids");
  }
  if (!(source.mass() > 0.0) || !(target.mass() > 0.0)) {
    throw InvalidDensity("transport endpoint has zero mass");
  }
}

// Piecewise-affine quantile function of a cell-average density, restricted
// to the cells that carry mass.  Masses are normalized to sum to one.
struct Quantile {
  double h = 0.0;
  std::vector<int> cell;    // supported cells, increasing
  std::vector<double> cum;  // cum[k] = mass before cell[k]; cum.back() == 1
  std::vector<double> mass;
  std::vector<double> cdf_left;   // for every grid cell: mass strictly left of it
  std::vector<double> cell_mass;  // for every grid cell

  explicit Quantile(const Density& d) : h(d.grid.h()) {
    const int n = d.grid.n_cells;
    double total = 0.0;
    for (double v : d.values) total += v;
    cdf_left.resize(n);
    cell_mass.resize(n);
    double run = 0.0;
    for (int i = 0; i < n; ++i) {
      cdf_left[i] = run / total;
      cell_mass[i] = d.values[i] / total;
      if (d.values[i] > 0.0) {
        cell.push_back(i);
        cum.push_back(run / total);
        mass.push_back(d.values[i] / total);
      }
      run += d.values[i];
    }
    cum.push_back(1.0);
  }

  // Position of quantile q inside supported cell k.
  double at(std::size_t k, double q) const {
    const double frac = std::clamp((q - cum[k]) / mass[k], 0.0, 1.0);
    return h * (cell[k] + frac);
  }

  // Generalized inverse inf{x : F(x) >= q}.
  double inverse(double q) const {
    auto it = std::upper_bound(cum.begin(), cum.end() - 1, q);
    std::size_t k = it == cum.begin() ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
    k = std::min(k, cell.size() - 1);
    return at(k, q);
  }
};

// Visits the merged quantile segments [q0, q1] with the source and target
// positions at both ends.
template <class Visit>
void merge_segments(const Quantile& s, const Quantile& t, Visit&& visit) {
  std::size_t i = 0;
  std::size_t j = 0;
  double q0 = 0.0;
  while (i < s.cell.size() && j < t.cell.size()) {
    const double qs = s.cum[i + 1];
    const double qt = t.cum[j + 1];
    const double q1 = std::min(qs, qt);
    if (q1 > q0) {
      visit(i, j, q0, q1, s.at(i, q0), s.at(i, q1), t.at(j, q0), t.at(j, q1));
    }
    q0 = std::max(q0, q1);
    if (qs <= q1) ++i;
    if (qt <= q1) ++j;
  }
}

}  // namespace

TransportResult quantile_w2(const Density& source, const Density& target) {
  check_pair(source, target);
  const Quantile qs(source);
  const Quantile qt(target);
  const Grid1D& grid = source.grid;
  const int n = grid.n_cells;

  std::vector<double> cost(qs.cell.size(), 0.0);
  std::vector<double> disp(qs.cell.size(), 0.0);
  merge_segments(qs, qt,
                 [&](std::size_t i, std::size_t, double q0, double q1, double xs0, double xs1,
                     double xt0, double xt1) {
                   const double d0 = xs0 - xt0;
                   const double d1 = xs1 - xt1;
                   const double dq = q1 - q0;
                   cost[i] += dq * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
                   disp[i] += dq * 0.5 * (d0 + d1);
                 });

  TransportResult out;
  out.map_values.resize(n);
  out.potential_grad.resize(n);
  for (int c = 0; c < n; ++c) {
    const double q = qs.cdf_left[c] + 0.5 * qs.cell_mass[c];
    out.map_values[c] = qt.inverse(std::min(q, 1.0));
    out.potential_grad[c] = grid.center(c) - out.map_values[c];
  }
  double total = 0.0;
  for (std::size_t k = 0; k < qs.cell.size(); ++k) {
    total += cost[k];
    const double rms = std::sqrt(cost[k] / qs.mass[k]);
    out.potential_grad[qs.cell[k]] = disp[k] < 0.0 ? -rms : rms;
  }
  out.w2_squared = total;
  return out;
}

Density displacement_interpolate(const Density& source, const Density& target, double t) {
  check_pair(source, target);
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "interpolation time must lie in [0, 1], got " << t;
    throw DomainError(msg.str());
  }
  const Quantile qs(source);
  const Quantile qt(target);
  const Grid1D& grid = source.grid;
  const int n = grid.n_cells;
  const double h = grid.h();
  std::vector<double> mass(n, 0.0);

  merge_segments(qs, qt,
                 [&](std::size_t, std::size_t, double q0, double q1, double xs0, double xs1,
                     double xt0, double xt1) {
                   const double dm = q1 - q0;
                   const double x0 = (1.0 - t) * xs0 + t * xt0;
                   const double x1 = std::max(x0, (1.0 - t) * xs1 + t * xt1);
                   const int c0 = std::clamp(static_cast<int>(std::floor(x0 / h)), 0, n - 1);
                   const int c1 = std::clamp(static_cast<int>(std::floor(x1 / h)), 0, n - 1);
                   if (c0 == c1 || x1 - x0 <= 1e-15 * grid.length) {
                     mass[c0] += dm;
                     return;
                   }
                   // Uniform spread of dm over [x0, x1]; the last cell takes
                   // the remainder so the segment's mass is deposited exactly.
                   double placed = 0.0;
                   for (int c = c0; c < c1; ++c) {
                     const double lo = std::max(x0, c * h);
                     const double hi = std::min(x1, (c + 1) * h);
                     const double part = dm * (hi - lo) / (x1 - x0);
                     mass[c] += part;
                     placed += part;
                   }
                   mass[c1] += dm - placed;
                 });

  Density out{grid, std::vector<double>(n)};
  for (int c = 0; c < n; ++c) out.values[c] = std::max(0.0, mass[c]) / h;
  return out;
}

namespace {

// log sum_k exp(v_k) over a strided view.
double log_sum_exp(const double* v, std::size_t count) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) m = std::max(m, v[k]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t k = 0; k < count; ++k) s += std::exp(v[k] - m);
  return m + std::log(s);
}

}  // namespace

SinkhornResult sinkhorn_w2(const Density& source, const Density& target,
                           const SinkhornOptions& options) {
  check_pair(source, target);
  if (!(options.eps_reg > 0.0)) {
    throw DomainError("sinkhorn needs eps_reg > 0");
  }
  const Grid1D& grid = source.grid;
  const int n = grid.n_cells;
  const double eps = options.eps_reg;

  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<double> a;
  std::vector<double> b;
  const double ms = source.mass();
  const double mt = target.mass();
  for (int i = 0; i < n; ++i) {
    if (source.values[i] > 0.0) {
      rows.push_back(i);
      a.push_back(source.values[i] * grid.h() / ms);
    }
    if (target.values[i] > 0.0) {
      cols.push_back(i);
      b.push_back(target.values[i] * grid.h() / mt);
    }
  }
  const std::size_t nr = rows.size();
  const std::size_t nc = cols.size();

  // Scaled cost C / eps, row-major, and its transpose for column sweeps.
  std::vector<double> cost(nr * nc);
  std::vector<double> cost_t(nc * nr);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      const double d = grid.center(rows[i]) - grid.center(cols[j]);
      cost[i * nc + j] = d * d / eps;
      cost_t[j * nr + i] = cost[i * nc + j];
    }
  }

  // Dual potentials divided by eps.
  std::vector<double> f(nr, 0.0);
  std::vector<double> g(nc, 0.0);
  std::vector<double> scratch(std::max(nr, nc));
  std::vector<double> log_a(nr);
  std::vector<double> log_b(nc);
  for (std::size_t i = 0; i < nr; ++i) log_a[i] = std::log(a[i]);
  for (std::size_t j = 0; j < nc; ++j) log_b[j] = std::log(b[j]);

  SinkhornResult result;
  double err = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < options.max_iter; ++it) {
    // Row update; the row marginal of the current plan comes for free.
    err = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      for (std::size_t j = 0; j < nc; ++j) scratch[j] = g[j] - cost[i * nc + j];
      const double lse = log_sum_exp(scratch.data(), nc);
      if (it > 0) err += std::abs(a[i] - std::exp(f[i] + lse));
      f[i] = log_a[i] - lse;
    }
    if (it > 0 && err < options.tol) break;
    for (std::size_t j = 0; j < nc; ++j) {
      for (std::size_t i = 0; i < nr; ++i) scratch[i] = f[i] - cost_t[j * nr + i];
      g[j] = log_b[j] - log_sum_exp(scratch.data(), nr);
    }
  }
  result.iterations = it;
  result.marginal_error = err;
  if (!(err < options.tol)) {
    std::ostringstream msg;
    msg << "sinkhorn did not reach marginal tolerance " << options.tol << " in "
        << options.max_iter << " iterations";
    throw ConvergenceError(msg.str(), err);
  }

  result.plan.assign(static_cast<std::size_t>(n) * n, 0.0);
  TransportResult& tr = result.transport;
  tr.map_values.resize(n);
  tr.potential_grad.assign(n, 0.0);
  for (int c = 0; c < n; ++c) tr.map_values[c] = grid.center(c);
  double w2 = 0.0;
  for (std::size_t i = 0; i < nr; ++i) {
    double row = 0.0;
    double moment = 0.0;
    for (std::size_t j = 0; j < nc; ++j) {
      const double p = std::exp(f[i] + g[j] - cost[i * nc + j]);
      result.plan[static_cast<std::size_t>(rows[i]) * n + cols[j]] = p;
      row += p;
      moment += p * grid.center(cols[j]);
      w2 += p * cost[i * nc + j] * eps;
    }
    if (row > 0.0) {
      tr.map_values[rows[i]] = moment / row;
      tr.potential_grad[rows[i]] = grid.center(rows[i]) - tr.map_values[rows[i]];
    }
  }
  tr.w2_squared = w2;
  return result;
}

}  // namespace crossflow
