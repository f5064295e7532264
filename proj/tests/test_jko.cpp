#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "crossflow/error.hpp"
#include "crossflow/jko.hpp"
#include "crossflow/presets.hpp"
#include "crossflow/slope_edi.hpp"
#include "crossflow/transport.hpp"

using namespace crossflow;

namespace {

double sup_diff(const Density& a, const Density& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

double sup_diff(const DensityPair& a, const DensityPair& b) {
  return std::max(sup_diff(a.rho, b.rho), sup_diff(a.mu, b.mu));
}

void expect_valid(const DensityPair& p) {
  const double h = p.grid().h();
  for (const Density* d : {&p.rho, &p.mu}) {
    double mass = 0.0;
    for (double v : d->values) {
      EXPECT_GE(v, 0.0);
      mass += v;
    }
    EXPECT_NEAR(h * mass, 1.0, 1e-10);
  }
}

// One short two_bumps run shared by several tests.
const Trajectory& two_bumps_run() {
  static const Trajectory traj = [] {
    const EnvelopeOracle oracle;
    JkoConfig cfg;
    return run_trajectory(make_preset("two_bumps", make_grid(128, 1.0)), cfg, oracle, 6,
                          default_dg_nodes());
  }();
  return traj;
}

}  // namespace

TEST(Jko, ConfigValidation) {
  JkoConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.tau = 0.0;
  EXPECT_THROW(validate(cfg), DomainError);
  cfg = JkoConfig{};
  cfg.eps_reg = -1.0;
  EXPECT_THROW(validate(cfg), DomainError);
  cfg = JkoConfig{};
  cfg.max_scaling_iter = 0;
  EXPECT_THROW(validate(cfg), DomainError);
}

TEST(Jko, UniformIsFixedPoint) {
  const EnvelopeOracle oracle;
  const DensityPair u = make_preset("uniform", make_grid(128, 1.0));
  const StepResult r = jko_step(u, JkoConfig{}, oracle);
  EXPECT_LE(sup_diff(r.next, u), 1e-8);
  EXPECT_LE(r.w2sq_rho, 1e-12);
  EXPECT_LE(r.w2sq_mu, 1e-12);
  for (double s : {0.125, 0.5}) {
    const StepResult d = de_giorgi_step(u, s, JkoConfig{}, oracle);
    EXPECT_LE(sup_diff(d.next, u), 1e-8) << "s=" << s;
  }
}

TEST(Jko, UniformFixedPointOnLongerDomain) {
  const EnvelopeOracle oracle;
  JkoConfig cfg;
  cfg.eps_reg = 1e-4 * 4.0;
  const DensityPair u = make_preset("uniform", make_grid(64, 2.0));
  const StepResult r = jko_step(u, cfg, oracle);
  EXPECT_LE(sup_diff(r.next, u), 1e-8);
}

TEST(Jko, RejectsBadStepAndGrid) {
  const EnvelopeOracle oracle;
  const Grid1D g = make_grid(32, 1.0);
  JkoSolver solver(g, JkoConfig{}, oracle);
  const DensityPair p = make_preset("two_bumps", g);
  EXPECT_THROW(solver.step(p, 0.0), DomainError);
  EXPECT_THROW(solver.step(p, 1.5), DomainError);
  EXPECT_THROW(solver.step(make_preset("two_bumps", make_grid(64, 1.0))), GridMismatch);
}

TEST(Jko, FullDeGiorgiStepIsJkoStep) {
  const EnvelopeOracle oracle;
  JkoConfig cfg;
  cfg.scaling_tol = 1e-11;
  const DensityPair p = make_preset("two_bumps", make_grid(128, 1.0));
  const StepResult a = jko_step(p, cfg, oracle);
  const StepResult b = de_giorgi_step(p, 1.0, cfg, oracle);
  EXPECT_LE(sup_diff(a.next, b.next), 1e-8);
  // A warm-started solver reaches the same minimizer.
  JkoSolver solver(p.grid(), cfg, oracle);
  solver.step(p, 0.5);
  const StepResult c = solver.step(p, 1.0);
  EXPECT_LE(sup_diff(a.next, c.next), 1e-8);
}

TEST(Jko, DistanceMovedGrowsWithStep) {
  const EnvelopeOracle oracle;
  const DensityPair p = make_preset("two_bumps", make_grid(128, 1.0));
  JkoSolver solver(p.grid(), JkoConfig{}, oracle);
  double prev = 0.0;
  for (double s : {0.25, 0.5, 0.75, 1.0}) {
    const StepResult r = solver.step(p, s);
    const double w = r.w2sq_rho + r.w2sq_mu;
    EXPECT_GE(w, prev) << "s=" << s;
    EXPECT_DOUBLE_EQ(r.tau_eff, s * 1e-3);
    prev = w;
  }
}

TEST(Jko, SupercriticalStepStaysValid) {
  const EnvelopeOracle oracle;
  const DensityPair p = make_preset("supercritical", make_grid(128, 1.0));
  const StepResult r = jko_step(p, JkoConfig{}, oracle);
  expect_valid(r.next);
  const double slack = 10.0 * 1e-4 * 128 * (1.0 / 128);
  EXPECT_LE(energy_f(r.next, oracle) + (r.w2sq_rho + r.w2sq_mu) / 2e-3, energy_f(p, oracle) + slack);
}

TEST(Jko, TrajectoryMassAndEnergy) {
  const EnvelopeOracle oracle;
  const Trajectory& traj = two_bumps_run();
  ASSERT_FALSE(traj.failure.has_value());
  ASSERT_EQ(traj.n_steps(), 6);
  const double slack = 10.0 * 1e-4 * 128 * (1.0 / 128);
  double kinetic = 0.0, f_min = energy_f(traj.initial, oracle);
  for (int k = 0; k < traj.n_steps(); ++k) {
    const StepResult& st = traj.steps[k];
    expect_valid(st.next);
    EXPECT_GE(st.w2sq_rho, 0.0);
    EXPECT_GE(st.w2sq_mu, 0.0);
    const double f0 = energy_f(traj.iterate(k), oracle);
    const double f1 = energy_f(st.next, oracle);
    EXPECT_LE(f1 + (st.w2sq_rho + st.w2sq_mu) / (2.0 * traj.tau), f0 + slack) << "step " << k;
    kinetic += (st.w2sq_rho + st.w2sq_mu) / (2.0 * traj.tau);
    f_min = std::min(f_min, f1);
    for (const StepResult& sample : traj.de_giorgi[k]) expect_valid(sample.next);
  }
  EXPECT_LE(kinetic, energy_f(traj.initial, oracle) - f_min + traj.n_steps() * slack);
}

TEST(Jko, KineticIdentity) {
  const Trajectory& traj = two_bumps_run();
  const double h = traj.initial.grid().h();
  for (int k = 0; k < traj.n_steps(); ++k) {
    const DensityPair& p = traj.iterate(k + 1);
    double ke_rho = 0.0, ke_mu = 0.0;
    for (int i = 0; i < p.grid().n_cells; ++i) {
      ke_rho += h * p.rho.values[i] * traj.velocity_rho[k][i] * traj.velocity_rho[k][i];
      ke_mu += h * p.mu.values[i] * traj.velocity_mu[k][i] * traj.velocity_mu[k][i];
    }
    const double tau2 = traj.tau * traj.tau;
    EXPECT_NEAR(ke_rho, traj.steps[k].w2sq_rho / tau2, 1e-8 * ke_rho);
    EXPECT_NEAR(ke_mu, traj.steps[k].w2sq_mu / tau2, 1e-8 * ke_mu);
  }
}

TEST(Jko, VelocityMatchesQuantileMapBack) {
  const Trajectory& traj = two_bumps_run();
  const TransportResult back = quantile_w2(traj.iterate(1).rho, traj.iterate(0).rho);
  EXPECT_NEAR(back.w2_squared, traj.steps[0].w2sq_rho, 1e-14);
  for (std::size_t i = 0; i < back.potential_grad.size(); ++i) {
    EXPECT_DOUBLE_EQ(traj.velocity_rho[0][i], back.potential_grad[i] / traj.tau);
  }
}

TEST(Jko, ResidualShrinksWithRegularization) {
  const EnvelopeOracle oracle;
  const DensityPair p = make_preset("two_bumps", make_grid(128, 1.0));
  JkoConfig cfg;
  const StepResult coarse = jko_step(p, cfg, oracle);
  cfg.eps_reg *= 0.5;
  const StepResult fine = jko_step(p, cfg, oracle);
  EXPECT_LT(fine.optimality_residual_rho, 0.75 * coarse.optimality_residual_rho);
  EXPECT_LT(fine.optimality_residual_mu, 0.75 * coarse.optimality_residual_mu);
}

TEST(Jko, EmptyTrajectory) {
  const EnvelopeOracle oracle;
  const DensityPair p = make_preset("two_bumps", make_grid(32, 1.0));
  const Trajectory traj = run_trajectory(p, JkoConfig{}, oracle, 0, default_dg_nodes());
  EXPECT_EQ(traj.n_steps(), 0);
  EXPECT_FALSE(traj.failure.has_value());
  EXPECT_EQ(sup_diff(interpolate(traj, 0.0, InterpolationKind::constant).pair, p), 0.0);
}

TEST(Jko, RejectsBadNodes) {
  const EnvelopeOracle oracle;
  const DensityPair p = make_preset("uniform", make_grid(16, 1.0));
  EXPECT_THROW(run_trajectory(p, JkoConfig{}, oracle, 1, {0.0, 1.0}), DomainError);
  EXPECT_THROW(run_trajectory(p, JkoConfig{}, oracle, 1, {0.5, 1.2}), DomainError);
  EXPECT_THROW(run_trajectory(p, JkoConfig{}, oracle, -1, {1.0}), DomainError);
}

TEST(Jko, FailureEndsRunWithPartialTrajectory) {
  const EnvelopeOracle oracle;
  JkoConfig cfg;
  cfg.max_scaling_iter = 1;
  const DensityPair p = make_preset("two_bumps", make_grid(64, 1.0));
  const Trajectory traj = run_trajectory(p, cfg, oracle, 5, {1.0});
  ASSERT_TRUE(traj.failure.has_value());
  EXPECT_EQ(traj.failure->step, 0);
  EXPECT_EQ(traj.failure->code, "convergence_error");
  EXPECT_EQ(traj.n_steps(), 0);
  try {
    jko_step(p, cfg, oracle);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.final_residual(), cfg.scaling_tol);
  }
}

TEST(Jko, InterpolationAgreesAtGridTimes) {
  const Trajectory& traj = two_bumps_run();
  for (int k = 1; k <= traj.n_steps(); ++k) {
    const double t = k * traj.tau;
    const Interpolated c = interpolate(traj, t, InterpolationKind::constant);
    const Interpolated g = interpolate(traj, t, InterpolationKind::geodesic);
    const Interpolated d = interpolate(traj, t, InterpolationKind::de_giorgi);
    EXPECT_EQ(sup_diff(c.pair, traj.iterate(k)), 0.0);
    EXPECT_LE(sup_diff(g.pair, traj.iterate(k)), 1e-9);
    EXPECT_FALSE(d.nearest_node);
    EXPECT_EQ(sup_diff(d.pair, traj.iterate(k)), 0.0);
  }
}

TEST(Jko, ConstantInterpolationIsRightContinuous) {
  const Trajectory& traj = two_bumps_run();
  const double tau = traj.tau;
  EXPECT_EQ(sup_diff(interpolate(traj, 0.3 * tau, InterpolationKind::constant).pair, traj.iterate(1)), 0.0);
  EXPECT_EQ(sup_diff(interpolate(traj, 2.5 * tau, InterpolationKind::constant).pair, traj.iterate(3)), 0.0);
  EXPECT_EQ(sup_diff(interpolate(traj, 2.0 * tau, InterpolationKind::constant).pair, traj.iterate(2)), 0.0);
  EXPECT_THROW(interpolate(traj, -tau, InterpolationKind::constant), DomainError);
  EXPECT_THROW(interpolate(traj, 7.0 * tau, InterpolationKind::geodesic), DomainError);
}

TEST(Jko, DeGiorgiInterpolationUsesStoredSamples) {
  const Trajectory& traj = two_bumps_run();
  const Interpolated exact = interpolate(traj, 2.375 * traj.tau, InterpolationKind::de_giorgi);
  EXPECT_FALSE(exact.nearest_node);
  EXPECT_EQ(sup_diff(exact.pair, traj.de_giorgi[2][2].next), 0.0);
  const Interpolated near = interpolate(traj, 2.4 * traj.tau, InterpolationKind::de_giorgi);
  EXPECT_TRUE(near.nearest_node);
  EXPECT_EQ(sup_diff(near.pair, traj.de_giorgi[2][2].next), 0.0);
}

TEST(Jko, ConstantAndGeodesicStayClose) {
  const Trajectory& traj = two_bumps_run();
  double max_step = 0.0;
  for (const StepResult& st : traj.steps) max_step = std::max(max_step, std::sqrt(st.w2sq_rho));
  for (int j = 1; j < 60; ++j) {
    const double t = j * 0.1 * traj.tau;
    const Density c = interpolate(traj, t, InterpolationKind::constant).pair.rho;
    const Density g = interpolate(traj, t, InterpolationKind::geodesic).pair.rho;
    EXPECT_LE(std::sqrt(quantile_w2(c, g).w2_squared), max_step * (1.0 + 1e-9)) << "t=" << t;
  }
}
