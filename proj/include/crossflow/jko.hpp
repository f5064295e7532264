#pragma once

// Minimizing-movement (JKO) steps for the pair (rho, mu) with energy
// F = integral of f(rho, mu), solved by entropic scaling.
//
// For an effective step t = s * tau each species gets a coupling gamma with
// the previous iterate as first marginal.  The scaled problem
//
//   <C, gamma_rho> + <C, gamma_mu> + eps * (KL(gamma_rho | K) + KL(gamma_mu | K))
//     + 2 t F(second marginals)
//
// with C = |x - y|^2 is solved by alternating the exact projection on the first
// marginals with a joint proximal step for F on the second marginals.  F acts
// cellwise, so the proximal step is an independent 2-D convex problem per
// cell.  The Gibbs kernel K is rescaled to be symmetric with unit row sums so
// that constant densities are an exact fixed point.

#include <optional>
#include <string>
#include <vector>

#include "crossflow/envelope.hpp"
#include "crossflow/grid.hpp"

namespace crossflow {

struct JkoConfig {
  double tau = 1e-3;
  double eps_reg = 1e-4;
  double prox_newton_tol = 1e-12;
  /// Summed L1 violation of both first marginals (cell masses).
  double scaling_tol = 1e-8;
  int max_scaling_iter = 200000;
  /// Cells with density at most mass_floor_scale / h count as empty in the
  /// optimality residual.
  double mass_floor_scale = 1e-9;

  double mass_floor(const Grid1D& g) const { return mass_floor_scale / g.h(); }
};

void validate(const JkoConfig& cfg);

struct StepResult {
  DensityPair next;
  /// Step length actually used (s * tau).
  double tau_eff = 0.0;
  double w2sq_rho = 0.0;
  double w2sq_mu = 0.0;
  /// id - T with T the optimal map from next back to the anchor.
  std::vector<double> potential_grad_rho;
  std::vector<double> potential_grad_mu;
  /// rho-weighted standard deviation of f_a + phi / tau_eff over the support,
  /// divided by the range of f_a there (likewise for mu with f_b).
  double optimality_residual_rho = 0.0;
  double optimality_residual_mu = 0.0;
  int scaling_iterations = 0;
  double marginal_error = 0.0;
  int kernel_rebuilds = 0;
  int prox_fallbacks = 0;
};

/// Holds the rescaled kernel and warm-start state between solves.  Not
/// thread safe; use one solver per thread.
class JkoSolver {
 public:
  JkoSolver(const Grid1D& grid, const JkoConfig& cfg, const EnvelopeOracle& oracle);

  /// Minimizes F + (W2^2(rho, anchor.rho) + W2^2(mu, anchor.mu)) / (2 s tau).
  StepResult step(const DensityPair& anchor, double s = 1.0);

  /// Drops warm-start data so the next solve starts cold.
  void reset();

  const JkoConfig& config() const noexcept { return cfg_; }
  const Grid1D& grid() const noexcept { return grid_; }

 private:
  Grid1D grid_;
  JkoConfig cfg_;
  const EnvelopeOracle* oracle_;
  std::vector<double> log_kernel_;  // n x n, log of the rescaled Gibbs kernel
  std::vector<double> la_;          // warm start: log densities of last prox
  std::vector<double> lb_;
  std::vector<double> psi_rho_;     // warm start: column potentials
  std::vector<double> psi_mu_;
  double last_c_ = 0.0;
};

StepResult jko_step(const DensityPair& current, const JkoConfig& cfg, const EnvelopeOracle& oracle);

StepResult de_giorgi_step(const DensityPair& anchor, double s, const JkoConfig& cfg,
                          const EnvelopeOracle& oracle);

/// Nodes 1/8, 2/8, ..., 1.
std::vector<double> default_dg_nodes();

struct StepFailure {
  int step = 0;
  std::string code;
  std::string message;
};

struct Trajectory {
  DensityPair initial;
  double tau = 0.0;
  std::vector<double> dg_nodes;
  /// steps[k] takes iterate k to iterate k + 1.
  std::vector<StepResult> steps;
  /// de_giorgi[k][m] is the solve anchored at iterate k with s = dg_nodes[m].
  std::vector<std::vector<StepResult>> de_giorgi;
  /// Per-step velocities (id - T) / tau on iterate k + 1.
  std::vector<std::vector<double>> velocity_rho;
  std::vector<std::vector<double>> velocity_mu;
  std::optional<StepFailure> failure;

  int n_steps() const noexcept { return static_cast<int>(steps.size()); }
  const DensityPair& iterate(int k) const { return k == 0 ? initial : steps[k - 1].next; }
};

/// Runs n_steps JKO steps with De Giorgi solves at every node.  A failing
/// solve ends the run; the partial trajectory carries the failure.
Trajectory run_trajectory(const DensityPair& init, const JkoConfig& cfg,
                          const EnvelopeOracle& oracle, int n_steps,
                          const std::vector<double>& dg_nodes);

enum class InterpolationKind { constant, geodesic, de_giorgi };

struct Interpolated {
  DensityPair pair;
  /// de_giorgi only: the fractional step was not a node and the nearest node
  /// was used.
  bool nearest_node = false;
};

/// On ((k-1) tau, k tau] the piecewise constant interpolation equals iterate k.
Interpolated interpolate(const Trajectory& traj, double t, InterpolationKind kind);

}  // namespace crossflow
