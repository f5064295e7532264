// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "certify.hpp"
#include "crossflow/envelope.hpp"
#include "crossflow/jko.hpp"
#include "crossflow/presets.hpp"
#include "crossflow/slope_edi.hpp"

using namespace crossflow;
using namespace crossflow::app;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "" : "[x] ") << what << "; ";
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const EnvelopeOracle& oracle() {
  static const EnvelopeOracle o;
  return o;
}

// Looks up certify properties by name and reports each one.
void require(Outcome& out, const std::vector<Property>& props, const std::vector<std::string>& names) {
  for (const std::string& name : names) {
    auto it = std::find_if(props.begin(), props.end(), [&](const Property& p) { return p.name == name; });
    if (it == props.end()) {
      out.check(false, name + " missing");
      continue;
    }
    out.check(it->passed(), name + "=" + num(it->value) + (it->bound == Bound::at_most ? " <= " : " >= ") +
                                num(it->limit));
  }
}

struct Run {
  std::string preset;
  double eps = 0.0;
  double h = 0.0;
  Trajectory traj;
  EdiLedger ledger;
  double seconds = 0.0;
};

Run run_preset(const std::string& preset, double L, int n, double eps, int steps, const std::vector<double>& nodes) {
  Run r;
  r.preset = preset;
  r.eps = eps;
  const Grid1D g = make_grid(n, L);
  r.h = g.h();
  JkoConfig cfg;
  cfg.eps_reg = eps;
  const auto t0 = std::chrono::steady_clock::now();
  r.traj = run_trajectory(make_preset(preset, g), cfg, oracle(), steps, nodes);
  r.seconds = seconds_since(t0);
  if (r.traj.n_steps() > 0) r.ledger = edi_report(r.traj, oracle(), cfg.mass_floor(g));
  return r;
}

// Shared trajectories, computed once.
struct Runs {
  Run two_bumps, two_bumps_half, super, super_half;
  std::vector<Run> others;
};

const Runs& runs() {
  static const Runs r = [] {
    Runs out;
    const auto nodes = default_dg_nodes();
    out.two_bumps = run_preset("two_bumps", 1.0, 128, 1e-4, 100, nodes);
    out.two_bumps_half = run_preset("two_bumps", 1.0, 128, 5e-5, 100, nodes);
    out.super = run_preset("supercritical", 1.0, 128, 1e-4, 100, nodes);
    out.super_half = run_preset("supercritical", 1.0, 128, 5e-5, 100, nodes);
    out.others.push_back(run_preset("uniform", 1.0, 128, 1e-4, 100, {1.0}));
    out.others.push_back(run_preset("step_overlap", 1.0, 128, 1e-4, 100, {1.0}));
    out.others.push_back(run_preset("smooth_a", 0.5, 128, 2.5e-5, 100, {1.0}));
    out.others.push_back(run_preset("smooth_b", 2.0, 128, 4e-4, 100, {1.0}));
    return out;
  }();
  return r;
}

void check_completed(Outcome& out, const Run& r) {
  if (r.traj.failure) {
    out.check(false, r.preset + " eps=" + num(r.eps) + " failed at step " + std::to_string(r.traj.failure->step) +
                         ": " + r.traj.failure->message);
  }
}

Outcome criterion1() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto props = envelope_battery(kSeed);
  const double secs = seconds_since(t0);
  require(out, props,
          {"alpha_plus_beta_residual", "pi_at_two_error", "pi_prime_at_two_one_sided_error",
           "pi_prime_vs_finite_difference", "tilde_f_second_vs_finite_difference", "midpoint_convexity_violations",
           "envelope_above_f0_violations", "envelope_differs_from_f0_on_b", "b_region_outside_unit_product"});
  out.check(secs < 30.0, "runtime " + num(secs) + " s < 30 s");
  return out;
}

Outcome criterion2() {
  Outcome out;
  require(out, envelope_battery(kSeed),
          {"scaled_curvature_left_limit_error", "scaled_curvature_right_limit_error", "r0_measured",
           "r0_measured_upper"});
  out.detail << "r0=" << oracle().r0() << " at s=" << oracle().r0_scan().argmin << "; ";
  return out;
}

Outcome criterion3() {
  Outcome out;
  require(out, transport_battery(kSeed),
          {"translation_error", "sinkhorn_relative_error", "potential_consistency_relative_error",
           "geodesic_constant_speed_relative_error"});
  return out;
}

Outcome criterion4() {
  Outcome out;
  const Run& r = runs().two_bumps;
  check_completed(out, r);
  const Trajectory& t = r.traj;
  const double slack = 10.0 * r.eps * 128 * r.h;
  double worst_increase = -INFINITY, worst_residual = 0.0, kinetic = 0.0;
  for (int k = 0; k < t.n_steps(); ++k) {
    const StepResult& s = t.steps[k];
    worst_increase = std::max(worst_increase, energy_f(s.next, oracle()) - energy_f(t.iterate(k), oracle()));
    worst_residual = std::max({worst_residual, s.optimality_residual_rho, s.optimality_residual_mu});
    kinetic += (s.w2sq_rho + s.w2sq_mu) / (2.0 * t.tau);
  }
  const double drop = energy_f(t.initial, oracle()) - energy_f(t.iterate(t.n_steps()), oracle());
  out.check(worst_increase <= slack, "max F increase " + num(worst_increase) + " <= " + num(slack));

  const DensityPair u = make_preset("uniform", make_grid(128, 1.0));
  const StepResult fixed = jko_step(u, JkoConfig{}, oracle());
  double fixed_err = 0.0;
  for (int i = 0; i < 128; ++i) {
    fixed_err = std::max({fixed_err, std::abs(fixed.next.rho.values[i] - u.rho.values[i]),
                          std::abs(fixed.next.mu.values[i] - u.mu.values[i])});
  }
  out.check(fixed_err <= 1e-8, "uniform fixed point " + num(fixed_err) + " <= 1e-8");
  out.check(worst_residual <= 1e-3, "max optimality residual " + num(worst_residual) + " <= 1e-3");
  out.check(kinetic <= drop + t.n_steps() * slack,
            "sum W2^2/(2 tau) " + num(kinetic) + " <= F0 - FN + N slack " + num(drop + t.n_steps() * slack));
  out.check(r.seconds < 180.0, "trajectory with De Giorgi solves " + num(r.seconds) + " s < 180 s");
  return out;
}

// Residuals below -100 (10 eps + 10 h) fail.  Between the two eps_reg values
// a nonnegative residual counts as improved; a negative one must shrink in
// magnitude by at least 25%.
Outcome criterion5() {
  Outcome out;
  for (auto [coarse, fine] : {std::pair{&runs().two_bumps, &runs().two_bumps_half},
                              std::pair{&runs().super, &runs().super_half}}) {
    for (const Run* r : {coarse, fine}) {
      check_completed(out, *r);
      const double bound = -100.0 * (10.0 * r->eps + 10.0 * r->h);
      out.check(r->ledger.residual >= bound, r->preset + " eps=" + num(r->eps) + " residual " +
                                                 num(r->ledger.residual) + " >= " + num(bound));
    }
    const double a = coarse->ledger.residual, b = fine->ledger.residual;
    const bool improves = b >= 0.0 || (a < 0.0 && std::abs(b) <= 0.75 * std::abs(a));
    out.check(improves, coarse->preset + " residual at eps/2 " + num(b) + " vs " + num(a));
  }
  return out;
}

Outcome criterion6() {
  Outcome out;
  std::vector<const Run*> all{&runs().two_bumps, &runs().super};
  for (const Run& r : runs().others) all.push_back(&r);
  for (const Run* r : all) {
    check_completed(out, *r);
    const double slack = 10.0 * r->eps + 10.0 * r->h;
    double worst = INFINITY;
    for (const EdiStep& s : r->ledger.per_step) {
      worst = std::min(worst, s.flow_interchange_lhs - s.flow_interchange_rhs + slack);
    }
    out.check(worst >= 0.0, r->preset + " min margin " + num(worst));
  }
  return out;
}

Outcome criterion7() {
  Outcome out;
  require(out, slope_battery(kSeed), {"dissipation_form_violations", "dissipation_form_minimum"});
  return out;
}

Outcome criterion8() {
  Outcome out;
  require(out, slope_battery(kSeed),
          {"sum_gradient_bound_violations", "a_region_equality_relative_error",
           "a_region_alternative_form_relative_error"});
  return out;
}

Outcome criterion9() {
  Outcome out;
  KernelCertification cert;
  require(out, kernel_battery(kSeed, 2, &cert),
          {"kernel_mass_error", "derivative_bound_violations", "curvature_bound_violations",
           "cauchy_schwarz_chain_relative_excess", "h1conv_k_est_finite", "h1conv_k_est_positive",
           "h1conv_refinement_deviation"});
  out.detail << "K_est=" << num(cert.max_ratio) << " at " << cert.argmax.u_name << " c=" << num(cert.argmax.c)
             << " eps=" << cert.argmax.eps << "; ";
  return out;
}

// tau and eps_reg are refined with h so that the entropic diffusion
// eps / (2 tau) stays fixed; 40 steps at n = 128 cover the same time horizon.
double chain_defect(const std::string& preset, double L, int n, ChainRuleChoice choice) {
  JkoConfig cfg;
  cfg.tau = 1e-3 * L * L * 128.0 / n;
  cfg.eps_reg = 1e-4 * L * L * 128.0 / n;
  const Trajectory t = run_trajectory(make_preset(preset, make_grid(n, L)), cfg, oracle(), 40 * n / 128, {1.0});
  if (t.failure) return NAN;
  return chain_rule_check(t, choice, oracle());
}

Outcome criterion10() {
  Outcome out;
  struct Case {
    const char* preset;
    double L;
    ChainRuleChoice choice;
    const char* label;
  };
  const Case cases[] = {{"smooth_a", 0.5, ChainRuleChoice::tilde_f_of_sum, "tilde_f_of_sum"},
                        {"smooth_a", 0.5, ChainRuleChoice::f_full, "f_full"},
                        {"smooth_b", 2.0, ChainRuleChoice::f_full, "f_full"}};
  for (const Case& c : cases) {
    const double coarse = chain_defect(c.preset, c.L, 128, c.choice);
    const double fine = chain_defect(c.preset, c.L, 256, c.choice);
    const double ratio = coarse / fine;
    out.check(ratio >= 1.5, std::string(c.preset) + " " + c.label + " " + num(coarse) + " -> " + num(fine) +
                                " ratio " + num(ratio) + " >= 1.5");
  }
  return out;
}

Outcome criterion11() {
  Outcome out;
  const int many = static_cast<int>(std::max(4u, std::thread::hardware_concurrency()));
  const std::string a = to_json(certify("all", kSeed, 1)).dump(2);
  const std::string b = to_json(certify("all", kSeed, 1)).dump(2);
  const std::string c = to_json(certify("all", kSeed, many)).dump(2);
  out.check(a == b, "two 1-thread runs identical");
  out.check(a == c, "1 thread vs " + std::to_string(many) + " threads identical");
  out.detail << a.size() << " bytes; ";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10, criterion11};
  int failures = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t1 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2zu %s (%.1f s): %s\n", i + 1, o.pass ? "PASS" : "FAIL", seconds_since(t1),
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failures,
              criteria.size(), seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
