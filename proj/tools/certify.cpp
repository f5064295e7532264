#include "certify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "crossflow/envelope.hpp"
#include "crossflow/error.hpp"
#include "crossflow/jko.hpp"
#include "crossflow/presets.hpp"
#include "crossflow/slope_edi.hpp"
#include "crossflow/transport.hpp"

namespace crossflow::app {

bool Property::passed() const { return std::isfinite(value) && margin() >= 0.0; }

double Property::margin() const { return bound == Bound::at_most ? limit - value : value - limit; }

bool SuiteReport::passed() const { return !first_failure(); }

std::optional<std::string> SuiteReport::first_failure() const {
  for (const Property& p : properties) {
    if (!p.passed()) return p.name;
  }
  return std::nullopt;
}

namespace {

Property at_most(std::string name, double value, double limit) {
  return {std::move(name), value, limit, Bound::at_most};
}

Property at_least(std::string name, double value, double limit) {
  return {std::move(name), value, limit, Bound::at_least};
}

const EnvelopeOracle& oracle() {
  static const EnvelopeOracle o;
  return o;
}

double sup_diff(const Density& a, const Density& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

double sup_diff(const DensityPair& a, const DensityPair& b) {
  return std::max(sup_diff(a.rho, b.rho), sup_diff(a.mu, b.mu));
}

Density random_density(const Grid1D& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> v(grid.n_cells);
  for (double& x : v) x = unif(rng) < 0.2 ? 0.0 : unif(rng);
  v[grid.n_cells / 2] += 0.1;
  return normalized(grid, std::move(v));
}

std::vector<double> smooth_profile(const Grid1D& g, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double c1 = unif(rng), c2 = unif(rng), s1 = unif(rng), s3 = unif(rng);
  std::vector<double> v(g.n_cells);
  for (int i = 0; i < g.n_cells; ++i) {
    const double x = 2.0 * std::numbers::pi * g.center(i) / g.length;
    v[i] = 1.0 + amp * (c1 * std::cos(x) + c2 * std::cos(2 * x) + s1 * std::sin(x) + s3 * std::sin(3 * x)) / 4.0;
  }
  return v;
}

}  // namespace

std::vector<Property> envelope_battery(std::uint64_t seed) {
  const EnvelopeOracle& o = oracle();
  std::vector<Property> out;

  double residual = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double s = 2.0 + 98.0 * k / 999.0;
    const Minimizers m = o.alpha_beta(s);
    residual = std::max(residual, std::abs(m.alpha + m.beta - s));
  }
  out.push_back(at_most("alpha_plus_beta_residual", residual, 1e-10));
  out.push_back(at_most("pi_at_two_error", std::abs(o.pi_value(2.0) - 1.0), 1e-8));
  const double d = 1e-7;
  out.push_back(at_most("pi_prime_at_two_one_sided_error", std::abs((o.pi_value(2.0 + d) - 1.0) / d + 0.5), 1e-3));

  double pi_fd = 0.0, f_fd = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double s = 2.01 + (50.0 - 2.01) * k / 400.0;
    const double h1 = 1e-5, h2 = 1e-4;
    pi_fd = std::max(pi_fd, std::abs((o.pi_value(s + h1) - o.pi_value(s - h1)) / (2 * h1) - o.pi_prime(s)));
    f_fd = std::max(f_fd, std::abs((o.tilde_f_prime(s + h2) - o.tilde_f_prime(s - h2)) / (2 * h2) -
                                   o.tilde_f_second(s)));
  }
  out.push_back(at_most("pi_prime_vs_finite_difference", pi_fd, 1e-6));
  out.push_back(at_most("tilde_f_second_vs_finite_difference", f_fd, 1e-5));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  int convexity = 0, above_f0 = 0, unequal_on_b = 0, b_outside = 0;
  for (int k = 0; k < 100000; ++k) {
    const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
    const double f1 = o.f_value(a1, b1), f2 = o.f_value(a2, b2);
    if (o.f_value(0.5 * (a1 + a2), 0.5 * (b1 + b2)) > 0.5 * (f1 + f2) + 1e-12) ++convexity;
    if (f1 > f0(a1, b1) + 1e-12) ++above_f0;
    if (o.classify(a1, b1) == Region::B) {
      if (f1 != f0(a1, b1)) ++unequal_on_b;
      if (a1 * b1 >= 1.0) ++b_outside;
    }
  }
  out.push_back(at_most("midpoint_convexity_violations", convexity, 0));
  out.push_back(at_most("envelope_above_f0_violations", above_f0, 0));
  out.push_back(at_most("envelope_differs_from_f0_on_b", unequal_on_b, 0));
  out.push_back(at_most("b_region_outside_unit_product", b_outside, 0));

  const double left = (2.0 + 1e-6) * o.tilde_f_second(2.0 + 1e-6);
  out.push_back(at_most("scaled_curvature_left_limit_error", std::abs(left - 0.5), 1e-2));
  out.push_back(at_most("scaled_curvature_right_limit_error", std::abs(o.r0_scan().at_right - 1.0), 1e-2));
  out.push_back(at_least("r0_measured", o.r0(), 1e-300));
  out.push_back(at_most("r0_measured_upper", o.r0(), 1.0));
  return out;
}

std::vector<Property> transport_battery(std::uint64_t seed) {
  std::vector<Property> out;
  {
    const Grid1D grid = make_grid(100, 1.0);
    double err = 0.0;
    for (double d : {0.25, 0.37}) {
      const Density a = indicator_density(grid, 0.2, 0.5);
      const Density b = indicator_density(grid, 0.2 + d, 0.5 + d);
      err = std::max(err, std::abs(quantile_w2(a, b).w2_squared - d * d));
    }
    out.push_back(at_most("translation_error", err, 1e-12));
  }
  {
    const Grid1D grid = make_grid(128, 1.0);
    const Density a = gaussian_bump(grid, 0.375, 1.0 / 16);
    const Density b = gaussian_bump(grid, 0.625, 1.0 / 16);
    const double exact = quantile_w2(a, b).w2_squared;
    const SinkhornResult r = sinkhorn_w2(a, b, {1e-4, 100000, 1e-9});
    out.push_back(at_most("sinkhorn_relative_error", std::abs(r.transport.w2_squared - exact) / exact, 0.01));
  }
  std::mt19937_64 rng(seed);
  {
    const Grid1D grid = make_grid(128, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const Density a = random_density(grid, rng);
      const Density b = random_density(grid, rng);
      const TransportResult r = quantile_w2(a, b);
      double ke = 0.0;
      for (int i = 0; i < grid.n_cells; ++i) ke += grid.h() * a.values[i] * r.potential_grad[i] * r.potential_grad[i];
      worst = std::max(worst, std::abs(ke - r.w2_squared) / r.w2_squared);
    }
    out.push_back(at_most("potential_consistency_relative_error", worst, 1e-8));
  }
  {
    const Grid1D grid = make_grid(48, 1.0);
    int triangle = 0, monotone = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const Density a = random_density(grid, rng);
      const Density b = random_density(grid, rng);
      const Density c = random_density(grid, rng);
      const TransportResult ab = quantile_w2(a, b);
      const double w_ab = std::sqrt(ab.w2_squared);
      const double w_bc = std::sqrt(quantile_w2(b, c).w2_squared);
      const double w_ac = std::sqrt(quantile_w2(a, c).w2_squared);
      if (w_ac > w_ab + w_bc + 1e-10) ++triangle;
      for (int i = 1; i < grid.n_cells; ++i) {
        if (ab.map_values[i - 1] > ab.map_values[i]) ++monotone;
      }
    }
    out.push_back(at_most("triangle_inequality_violations", triangle, 0));
    out.push_back(at_most("map_monotonicity_violations", monotone, 0));
  }
  {
    const Grid1D grid = make_grid(128, 1.0);
    double speed = 0.0, mass = 0.0;
    for (const char* name : {"two_bumps", "step_overlap", "supercritical"}) {
      const DensityPair p = make_preset(name, grid);
      const double w = std::sqrt(quantile_w2(p.rho, p.mu).w2_squared);
      for (auto [s, t] : {std::pair{0.0, 0.5}, {0.25, 0.75}, {0.1, 0.9}, {0.5, 1.0}}) {
        const Density ds = displacement_interpolate(p.rho, p.mu, s);
        const Density dt = displacement_interpolate(p.rho, p.mu, t);
        speed = std::max(speed, std::abs(std::sqrt(quantile_w2(ds, dt).w2_squared) - (t - s) * w) / ((t - s) * w));
        mass = std::max(mass, std::abs(ds.mass() - 1.0));
      }
    }
    out.push_back(at_most("geodesic_constant_speed_relative_error", speed, 0.02));
    out.push_back(at_most("interpolation_mass_error", mass, 1e-12));
  }
  return out;
}

std::vector<Property> jko_battery(std::uint64_t seed) {
  (void)seed;  // deterministic battery
  const EnvelopeOracle& o = oracle();
  std::vector<Property> out;
  const Grid1D grid = make_grid(128, 1.0);
  {
    const DensityPair u = make_preset("uniform", grid);
    const StepResult r = jko_step(u, JkoConfig{}, o);
    out.push_back(at_most("uniform_fixed_point_sup_error", sup_diff(r.next, u), 1e-8));
    out.push_back(at_most("uniform_fixed_point_w2sq", r.w2sq_rho + r.w2sq_mu, 1e-12));
  }
  const DensityPair p = make_preset("two_bumps", grid);
  {
    JkoConfig cfg;
    cfg.scaling_tol = 1e-11;
    const StepResult a = jko_step(p, cfg, o);
    const StepResult b = de_giorgi_step(p, 1.0, cfg, o);
    out.push_back(at_most("full_de_giorgi_step_matches_jko_step", sup_diff(a.next, b.next), 1e-8));
  }
  {
    JkoSolver solver(grid, JkoConfig{}, o);
    int violations = 0;
    double prev = 0.0;
    for (double s : {0.25, 0.5, 0.75, 1.0}) {
      const StepResult r = solver.step(p, s);
      if (r.w2sq_rho + r.w2sq_mu < prev) ++violations;
      prev = r.w2sq_rho + r.w2sq_mu;
    }
    out.push_back(at_most("w2sq_monotone_in_step_violations", violations, 0));
  }
  {
    const JkoConfig cfg;
    const Trajectory traj = run_trajectory(p, cfg, o, 10, {1.0});
    out.push_back(at_most("short_run_failed", traj.failure ? 1.0 : 0.0, 0.0));
    const double slack = 10.0 * cfg.eps_reg * grid.n_cells * grid.h();
    double energy = -INFINITY, mass = 0.0, min_value = INFINITY, kinetic_err = 0.0, kinetic = 0.0;
    double f_min = energy_f(traj.initial, o);
    for (int k = 0; k < traj.n_steps(); ++k) {
      const StepResult& st = traj.steps[k];
      const double f0v = energy_f(traj.iterate(k), o), f1v = energy_f(st.next, o);
      energy = std::max(energy, f1v + (st.w2sq_rho + st.w2sq_mu) / (2.0 * cfg.tau) - f0v);
      kinetic += (st.w2sq_rho + st.w2sq_mu) / (2.0 * cfg.tau);
      f_min = std::min(f_min, f1v);
      for (const Density* d : {&st.next.rho, &st.next.mu}) {
        mass = std::max(mass, std::abs(d->mass() - 1.0));
        min_value = std::min(min_value, *std::min_element(d->values.begin(), d->values.end()));
      }
      double ke = 0.0;
      for (int i = 0; i < grid.n_cells; ++i) {
        ke += grid.h() * st.next.rho.values[i] * traj.velocity_rho[k][i] * traj.velocity_rho[k][i];
      }
      const double ref = st.w2sq_rho / (cfg.tau * cfg.tau);
      kinetic_err = std::max(kinetic_err, std::abs(ke - ref) / ref);
    }
    out.push_back(at_most("energy_decrease_worst_excess", energy, slack));
    out.push_back(at_most("cumulative_kinetic_excess",
                          kinetic - (energy_f(traj.initial, o) - f_min), traj.n_steps() * slack));
    out.push_back(at_most("mass_error", mass, 1e-10));
    out.push_back(at_least("min_density", min_value, 0.0));
    out.push_back(at_most("kinetic_identity_relative_error", kinetic_err, 1e-8));
  }
  return out;
}

std::vector<Property> slope_battery(std::uint64_t seed) {
  const EnvelopeOracle& o = oracle();
  std::vector<Property> out;
  {
    const DensityPair u = make_preset("uniform", make_grid(64, 1.0));
    out.push_back(at_most("uniform_slope", slope_f(u, o).total(), 0.0));
  }
  std::mt19937_64 rng(seed);
  {
    std::uniform_real_distribution<double> val(1e-6, 4.0), grad(-1.0, 1.0);
    int draws = 0, violations = 0;
    double worst = INFINITY;
    while (draws < 100000) {
      const double a = val(rng), b = val(rng);
      if (o.classify(a, b) != Region::B) continue;
      ++draws;
      const double q = entropy_dissipation_form(a, b, grad(rng), grad(rng), o.r0());
      worst = std::min(worst, q);
      if (q < -1e-12) ++violations;
    }
    out.push_back(at_most("dissipation_form_violations", violations, 0));
    out.push_back(at_least("dissipation_form_minimum", worst, -1e-12));
  }
  {
    std::uniform_real_distribution<double> scale(0.05, 3.0);
    int violations = 0;
    double slope_mismatch = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Grid1D g = make_grid(64, scale(rng));
      const DensityPair p{normalized(g, smooth_profile(g, rng, 0.95)), normalized(g, smooth_profile(g, rng, 0.95))};
      double lhs = 0.0, rhs = 0.0;
      for (int i = 0; i + 1 < 64; ++i) {
        const double a = p.rho.values[i], b = p.mu.values[i];
        const double da = (p.rho.values[i + 1] - a) / g.h(), db = (p.mu.values[i + 1] - b) / g.h();
        const SlopeBound t = slope_bound_terms(a, b, da, db, o);
        if (t.lhs > t.rhs + 1e-12 * std::max(1.0, t.rhs)) ++violations;
        lhs += g.h() * t.lhs;
        rhs += g.h() * t.rhs;
      }
      if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) ++violations;
      slope_mismatch = std::max(slope_mismatch, std::abs(rhs - slope_f(p, o).total()) / std::max(rhs, 1.0));
    }
    out.push_back(at_most("sum_gradient_bound_violations", violations, 0));
    out.push_back(at_most("sum_gradient_bound_rhs_vs_slope", slope_mismatch, 1e-10));
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const Grid1D g = make_grid(64, 0.4);
      const DensityPair p{normalized(g, smooth_profile(g, rng, 0.6)), normalized(g, smooth_profile(g, rng, 0.6))};
      for (int i = 0; i + 1 < 64; ++i) {
        const double a = p.rho.values[i], b = p.mu.values[i];
        if (o.classify(a, b) != Region::A) continue;
        const SlopeBound t = slope_bound_terms(a, b, (p.rho.values[i + 1] - a) / g.h(),
                                               (p.mu.values[i + 1] - b) / g.h(), o);
        if (t.rhs > 0.0) worst = std::max(worst, std::abs(t.lhs - t.rhs) / t.rhs);
      }
    }
    out.push_back(at_most("a_region_equality_relative_error", worst, 1e-6));
    const DensityPair sa = make_preset("smooth_a", make_grid(128, 0.5));
    const double alt = slope_a_region_alternative(sa, o);
    out.push_back(at_most("a_region_alternative_form_relative_error",
                          std::abs(slope_f(sa, o).a_region_part - alt) / alt, 1e-6));
  }
  {
    const Grid1D g = make_grid(128, 2.0);
    const Density c = cosine_profile(g, 0.5);
    double ref = 0.0;
    for (int i = 0; i + 1 < 128; ++i) {
      const double r = c.values[i], d = (c.values[i + 1] - r) / g.h();
      ref += 2.0 * g.h() * d * d * (1.0 + r) * (1.0 + r) / r;
    }
    out.push_back(at_most("equal_species_b_formula_relative_error",
                          std::abs(slope_f(DensityPair{c, c}, o).total() - ref) / ref, 1e-12));
  }
  {
    double worst = INFINITY;
    for (int i = 0; i <= 400; ++i) {
      for (int j = 0; j <= 400; ++j) {
        const double a = 0.02 * i, b = 0.02 * j;
        const double ga = a > 0 ? a * std::log(a) : 0.0, gb = b > 0 ? b * std::log(b) : 0.0;
        worst = std::min(worst, o.f_value(a, b) - ga - gb);
      }
    }
    out.push_back(at_least("envelope_minus_entropy_minimum", worst, -1e-12));
  }
  {
    const Grid1D g = make_grid(128, 1.0);
    double worst = INFINITY;
    for (const char* name : {"two_bumps", "step_overlap", "supercritical"}) {
      worst = std::min(worst, slope_f(make_preset(name, g), o, 1e-9 / g.h()).total());
    }
    out.push_back(at_least("slope_nonnegative", worst, 0.0));
    const Trajectory traj = run_trajectory(make_preset("uniform", make_grid(64, 1.0)), JkoConfig{}, o, 2,
                                           default_dg_nodes());
    out.push_back(at_most("stationary_edi_residual", std::abs(edi_report(traj, o).residual), 1e-10));
  }
  return out;
}

std::vector<Property> kernel_battery(std::uint64_t seed, int threads, KernelCertification* cert) {
  std::vector<Property> out;
  const double ms[] = {3.0, 4.0, 6.0};
  const double epss[] = {0.1, 0.02};
  const Grid1D grid = make_grid(1024, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double mass = 0.0, min_value = INFINITY, cs = 0.0, scale_err = 0.0;
  int deriv = 0, curv = 0;
  for (double m : ms) {
    for (double eps : epss) {
      const Mollifier k = make_mollifier(m, eps, grid);
      double sum = 0.0;
      for (int i = 0; i < grid.n_cells; ++i) {
        const double v = k.values[i], d = k.deriv_values[i], d2 = k.second_deriv_pos[i];
        sum += v;
        min_value = std::min(min_value, v);
        if (i == 0) continue;
        if (eps * std::abs(d) > m * v * (1.0 + 1e-12)) ++deriv;
        if (d2 * v < (1.0 + 1.0 / m) * d * d * (1.0 - 1e-12)) ++curv;
      }
      mass = std::max(mass, std::abs(grid.h() * sum - 1.0));

      std::vector<double> w(grid.n_cells);
      for (double& x : w) x = unif(rng) * unif(rng);
      const auto a = convolve(w, k.deriv_values, grid);
      const auto b = convolve(w, k.values, grid);
      const auto c = convolve(w, k.second_deriv_pos, grid);
      for (int i = 0; i < grid.n_cells; ++i) {
        cs = std::max(cs, ((1.0 + 1.0 / m) * a[i] * a[i] - b[i] * c[i]) / (b[i] * c[i]));
      }

      // Direct lattice sum with the integral-test tail.
      for (int p = 0; p < 10; ++p) {
        const double x = unif(rng);
        const int K = 200000;
        long double acc = 0.0L;
        for (int j = -K; j <= K; ++j) acc += kernel_profile(m, (x - j) / eps) / eps;
        const double tail = (m - 1.0) * std::pow(eps, m - 1.0) * std::pow(K + 0.5, 1.0 - m) / (m - 1.0);
        const double ref = static_cast<double>(acc) + tail;
        scale_err = std::max(scale_err, std::abs(k.eval(x) - ref) / ref);
      }
    }
  }
  out.push_back(at_most("kernel_mass_error", mass, 1e-10));
  out.push_back(at_least("kernel_min_value", min_value, 1e-300));
  out.push_back(at_most("derivative_bound_violations", deriv, 0));
  out.push_back(at_most("curvature_bound_violations", curv, 0));
  out.push_back(at_most("cauchy_schwarz_chain_relative_excess", cs, 1e-10));
  out.push_back(at_most("scale_identity_relative_error", scale_err, 1e-10));

  {
    const Grid1D g = make_grid(256, 1.0);
    const Mollifier k = make_mollifier(4.0, 0.05, g);
    double worst = 0.0;
    for (const auto& field : sweep_corpus(256, seed)) {
      std::vector<double> scaled(field.values);
      for (double& v : scaled) v *= 3.7;
      for (double c : {0.01, 0.2, 0.5}) {
        const double r = h1conv_ratio(field.values, c, k);
        const double rs = h1conv_ratio(scaled, 3.7 * c, k);
        if (r > 0.0) worst = std::max(worst, std::abs(rs - r) / r);
      }
    }
    out.push_back(at_most("h1conv_homogeneity_relative_error", worst, 1e-10));
  }

  const KernelCertification c = certify_h1conv(3.0, {0.2, 0.05, 0.0125}, 512, seed, threads);
  out.push_back(at_least("h1conv_k_est_positive", c.max_ratio, 1e-300));
  out.push_back(at_most("h1conv_k_est_finite", std::isfinite(c.max_ratio) ? 0.0 : 1.0, 0.0));
  out.push_back(at_most("h1conv_refinement_deviation", std::abs(c.refinement_ratio - 1.0), 0.2));
  if (cert) *cert = c;
  return out;
}

SuiteReport certify(const std::string& suite, std::uint64_t seed, int threads) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw ConfigError("config_invalid", "unknown suite '" + suite + "'");
  }
  SuiteReport report;
  report.suite = suite;
  report.seed = seed;
  auto append = [&](const std::string& prefix, std::vector<Property> props) {
    for (Property& p : props) {
      p.name = prefix + "." + p.name;
      report.properties.push_back(std::move(p));
    }
  };
  const bool all = suite == "all";
  if (all || suite == "envelope") append("envelope", envelope_battery(seed));
  if (all || suite == "transport") append("transport", transport_battery(seed));
  if (all || suite == "jko") append("jko", jko_battery(seed));
  if (all || suite == "slope") append("slope", slope_battery(seed));
  if (all || suite == "kernel") {
    KernelCertification cert;
    append("kernel", kernel_battery(seed, threads, &cert));
    report.kernel = cert;
  }
  return report;
}

nlohmann::ordered_json to_json(const KernelCertification& cert) {
  nlohmann::ordered_json j;
  j["m"] = cert.m;
  j["eps_list"] = cert.eps_list;
  j["corpus"] = cert.corpus;
  j["max_ratio"] = cert.max_ratio;
  j["argmax"] = {{"u_name", cert.argmax.u_name}, {"c", cert.argmax.c}, {"eps", cert.argmax.eps}};
  j["refinement_ratio"] = cert.refinement_ratio;
  j["n_coarse"] = cert.n_coarse;
  j["n_fine"] = cert.n_fine;
  j["max_ratio_coarse"] = cert.max_ratio_coarse;
  j["levels"] = sweep_levels();
  return j;
}

nlohmann::ordered_json to_json(const SuiteReport& report) {
  nlohmann::ordered_json j;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["passed"] = report.passed();
  if (auto f = report.first_failure()) {
    j["first_failure"] = *f;
  } else {
    j["first_failure"] = nullptr;
  }
  nlohmann::ordered_json props = nlohmann::ordered_json::array();
  for (const Property& p : report.properties) {
    props.push_back({{"name", p.name},
                     {"passed", p.passed()},
                     {"value", p.value},
                     {"limit", p.limit},
                     {"bound", p.bound == Bound::at_most ? "at_most" : "at_least"},
                     {"margin", p.margin()}});
  }
  j["properties"] = props;
  if (report.kernel) {
    j["K_est"] = report.kernel->max_ratio;
    j["kernel_certification"] = to_json(*report.kernel);
  }
  return j;
}

}  // namespace crossflow::app
