#include "crossflow/slope_edi.hpp"

#include <algorithm>
#include <cmath>

#include "crossflow/error.hpp"

namespace crossflow {

namespace {

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

// Forward difference owned by cell i; zero on the last cell.
double grad_at(const std::vector<double>& v, int i, double h) {
  return i + 1 < static_cast<int>(v.size()) ? (v[i + 1] - v[i]) / h : 0.0;
}

}  // namespace

double energy_f(const DensityPair& pair, const EnvelopeOracle& oracle) {
  std::vector<double> terms(pair.rho.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = oracle.f_value(pair.rho.values[i], pair.mu.values[i]);
  }
  return pair.grid().h() * pairwise_sum(terms);
}

double energy_f0(const DensityPair& pair) {
  std::vector<double> terms(pair.rho.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = f0(pair.rho.values[i], pair.mu.values[i]);
  return pair.grid().h() * pairwise_sum(terms);
}

double energy_g(const DensityPair& pair) {
  std::vector<double> terms(pair.rho.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = xlogx(pair.rho.values[i]) + xlogx(pair.mu.values[i]);
  }
  return pair.grid().h() * pairwise_sum(terms);
}

SlopeBreakdown slope_f(const DensityPair& pair, const EnvelopeOracle& oracle, double mass_floor,
                       SlopeReading reading) {
  const auto& rho = pair.rho.values;
  const auto& mu = pair.mu.values;
  const int n = pair.grid().n_cells;
  const double h = pair.grid().h();
  SlopeBreakdown out;
  out.cell_classification.resize(n);
  std::vector<double> b_terms(n, 0.0), a_terms(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double a = rho[i];
    const double b = mu[i];
    const double da = grad_at(rho, i, h);
    const double db = grad_at(mu, i, h);
    const Region region = oracle.classify(a, b);
    out.cell_classification[i] = region;
    if (region == Region::A) {
      const double s = a + b;
      const double k = oracle.tilde_f_second(s);
      a_terms[i] = k * k * (da + db) * (da + db) * s;
      continue;
    }
    double term = 0.0;
    if (a > mass_floor) {
      const double ga = da / a + (reading == SlopeReading::expanded ? db : b);
      term += a * ga * ga;
    }
    if (b > mass_floor) {
      const double gb = db / b + (reading == SlopeReading::expanded ? da : a);
      term += b * gb * gb;
    }
    b_terms[i] = term;
  }
  out.b_region_part = h * pairwise_sum(b_terms);
  out.a_region_part = h * pairwise_sum(a_terms);
  return out;
}

double slope_a_region_alternative(const DensityPair& pair, const EnvelopeOracle& oracle) {
  const auto& rho = pair.rho.values;
  const auto& mu = pair.mu.values;
  const int n = pair.grid().n_cells;
  const double h = pair.grid().h();
  std::vector<double> terms(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (oracle.classify(rho[i], mu[i]) != Region::A) continue;
    const double s = rho[i] + mu[i];
    const double ds = grad_at(rho, i, h) + grad_at(mu, i, h);
    const double g = (1.0 + oracle.pi_prime(s)) * ds;
    terms[i] = g * g / s;
  }
  return h * pairwise_sum(terms);
}

SlopeBound slope_bound_terms(double a, double b, double da, double db, const EnvelopeOracle& oracle) {
  SlopeBound out;
  const double s = a + b;
  out.region = oracle.classify(a, b);
  if (out.region == Region::A) {
    const double ds = da + db;
    const double g = (1.0 + oracle.pi_prime(s)) * ds;
    const double k = oracle.tilde_f_second(s);
    out.lhs = g * g / s;
    out.rhs = s * k * k * ds * ds;
    return out;
  }
  const double g = da + db + b * da + a * db;  // grad (S + a b)
  const double ga = da / a + db;
  const double gb = db / b + da;
  out.lhs = g * g / s;
  out.rhs = a * ga * ga + b * gb * gb;
  return out;
}

double entropy_dissipation_form(double a, double b, double da, double db, double r) {
  const double s = a + b;
  return da * da * (1.0 / a - r / s) + db * db * (1.0 / b - r / s) + 2.0 * da * db * (1.0 - r / s);
}

double fisher_information_sum(const DensityPair& pair, double mass_floor) {
  const std::vector<double> s = pair.sum();
  const double h = pair.grid().h();
  std::vector<double> terms(s.size(), 0.0);
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    if (s[i] <= mass_floor) continue;
    const double g = grad_at(s, i, h);
    terms[i] = g * g / s[i];
  }
  return h * pairwise_sum(terms);
}

std::vector<double> quadrature_weights(const std::vector<double>& nodes) {
  std::vector<double> w(nodes.size());
  double prev = 0.0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    w[m] = nodes[m] - prev;
    prev = nodes[m];
  }
  return w;
}

EdiLedger edi_report(const Trajectory& traj, const EnvelopeOracle& oracle, double mass_floor) {
  if (traj.n_steps() > 0 && (traj.dg_nodes.empty() || traj.de_giorgi.size() != traj.steps.size())) {
    throw DomainError("trajectory lacks De Giorgi samples");
  }
  const double tau = traj.tau;
  const std::vector<double> weights = quadrature_weights(traj.dg_nodes);
  const double r0 = oracle.r0();
  EdiLedger led;
  led.f_initial = energy_f(traj.initial, oracle);
  double f_prev = led.f_initial;
  double g_prev = energy_g(traj.initial);
  for (int k = 0; k < traj.n_steps(); ++k) {
    const StepResult& st = traj.steps[k];
    EdiStep rec;
    rec.k = k;
    rec.f_before = f_prev;
    rec.f_after = energy_f(st.next, oracle);
    rec.w2sq_rho = st.w2sq_rho;
    rec.w2sq_mu = st.w2sq_mu;
    for (std::size_t m = 0; m < weights.size(); ++m) {
      const StepResult& sample = traj.de_giorgi[k][m];
      const double s = traj.dg_nodes[m];
      rec.slope_quad += weights[m] * slope_f(sample.next, oracle, mass_floor).total();
      rec.de_giorgi_quad += weights[m] * (sample.w2sq_rho + sample.w2sq_mu) / (2.0 * tau * tau * s * s);
    }
    rec.g_before = g_prev;
    rec.g_after = energy_g(st.next);
    rec.flow_interchange_lhs = rec.g_before - rec.g_after;
    rec.flow_interchange_rhs = r0 * tau * fisher_information_sum(st.next, mass_floor);
    led.kinetic_rho += st.w2sq_rho / tau;
    led.kinetic_mu += st.w2sq_mu / tau;
    led.slope_integral += tau * rec.slope_quad;
    f_prev = rec.f_after;
    g_prev = rec.g_after;
    led.per_step.push_back(rec);
  }
  led.f_final = f_prev;
  led.residual =
      led.f_initial - (led.f_final + 0.5 * (led.kinetic_rho + led.kinetic_mu + led.slope_integral));
  return led;
}

double chain_rule_check(const Trajectory& traj, ChainRuleChoice choice, const EnvelopeOracle& oracle) {
  auto g_energy = [&](const DensityPair& p) {
    if (choice == ChainRuleChoice::f_full) return energy_f(p, oracle);
    std::vector<double> terms(p.rho.values.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      terms[i] = oracle.tilde_f(p.rho.values[i] + p.mu.values[i]);
    }
    return p.grid().h() * pairwise_sum(terms);
  };
  const double h = traj.initial.grid().h();
  double flux = 0.0;
  for (int k = 0; k < traj.n_steps(); ++k) {
    const DensityPair& p = traj.iterate(k + 1);
    const auto& rho = p.rho.values;
    const auto& mu = p.mu.values;
    const auto& v = traj.velocity_rho[k];
    const auto& w = traj.velocity_mu[k];
    std::vector<double> terms(rho.size(), 0.0);
    for (int i = 0; i < static_cast<int>(rho.size()); ++i) {
      const double a = rho[i];
      const double b = mu[i];
      const double da = grad_at(rho, i, h);
      const double db = grad_at(mu, i, h);
      if (choice == ChainRuleChoice::tilde_f_of_sum || oracle.classify(a, b) == Region::A) {
        const double k = oracle.tilde_f_second(a + b);
        terms[i] = (a * v[i] + b * w[i]) * k * (da + db);
      } else {
        // Hessian of f0 is [[1/a, 1], [1, 1/b]]; multiplying through by a, b
        // keeps vanishing densities finite.
        terms[i] = v[i] * (da + a * db) + w[i] * (b * da + db);
      }
    }
    flux += traj.tau * h * pairwise_sum(terms);
  }
  return std::abs(g_energy(traj.iterate(traj.n_steps())) - g_energy(traj.initial) - flux);
}

}  // namespace crossflow
