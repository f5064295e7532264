#pragma once

#include <array>
#include <vector>

#include "crossflow/envelope.hpp"
#include "crossflow/grid.hpp"
#include "crossflow/jko.hpp"

namespace crossflow {

/// h * sum f(rho_i, mu_i), with 0 log 0 = 0.
double energy_f(const DensityPair& pair, const EnvelopeOracle& oracle);
/// h * sum f0(rho_i, mu_i).
double energy_f0(const DensityPair& pair);
/// h * sum (rho log rho + mu log mu).
double energy_g(const DensityPair& pair);

/// Which B-region integrand to use.  `expanded` uses grad f_a = grad rho / rho
/// + grad mu; `literal` keeps the alternative reading grad rho / rho + mu,
/// available only for comparison.
enum class SlopeReading { expanded, literal };

struct SlopeBreakdown {
  double b_region_part = 0.0;
  double a_region_part = 0.0;
  std::vector<Region> cell_classification;

  double total() const noexcept { return b_region_part + a_region_part; }
};

/// Discrete slope.  Gradients are forward differences; the interface between
/// cells i and i + 1 belongs to cell i and the last cell has zero gradient.
/// Cells with a density at or below `mass_floor` drop that species' B term.
SlopeBreakdown slope_f(const DensityPair& pair, const EnvelopeOracle& oracle, double mass_floor = 0.0,
                       SlopeReading reading = SlopeReading::expanded);

/// h * sum over A cells of |grad(S + pi(S))|^2 / S with the chain rule
/// grad(S + pi(S)) = (1 + pi'(S)) grad S.
double slope_a_region_alternative(const DensityPair& pair, const EnvelopeOracle& oracle);

/// Pointwise sides of |grad(S + P)|^2 / S <= rho |grad f_a|^2 + mu |grad f_b|^2
/// for given values and gradients, with P the product function.
struct SlopeBound {
  double lhs = 0.0;
  double rhs = 0.0;
  Region region = Region::B;
};
SlopeBound slope_bound_terms(double a, double b, double da, double db, const EnvelopeOracle& oracle);

/// da^2 (1/a - r/S) + db^2 (1/b - r/S) + 2 da db (1 - r/S) with S = a + b.
double entropy_dissipation_form(double a, double b, double da, double db, double r);

/// h * sum |grad S|^2 / S over cells with S above `mass_floor`.
double fisher_information_sum(const DensityPair& pair, double mass_floor = 0.0);

struct EdiStep {
  int k = 0;
  double f_before = 0.0;
  double f_after = 0.0;
  double w2sq_rho = 0.0;
  double w2sq_mu = 0.0;
  /// Quadrature over the De Giorgi nodes of the slope at the samples.
  double slope_quad = 0.0;
  /// G(before) - G(after) and r0 tau h sum |grad S|^2 / S at the new iterate.
  double flow_interchange_lhs = 0.0;
  double flow_interchange_rhs = 0.0;
  /// Quadrature of (w2sq_rho(s) + w2sq_mu(s)) / (2 tau^2 s^2) over the nodes.
  double de_giorgi_quad = 0.0;
  double g_before = 0.0;
  double g_after = 0.0;
};

struct EdiLedger {
  double f_initial = 0.0;
  double f_final = 0.0;
  double kinetic_rho = 0.0;
  double kinetic_mu = 0.0;
  double slope_integral = 0.0;
  /// F(initial) - [F(final) + (kinetic_rho + kinetic_mu + slope_integral) / 2].
  double residual = 0.0;
  std::vector<EdiStep> per_step;
};

/// Right-endpoint weights s_m - s_{m-1} for sorted nodes in (0, 1].
std::vector<double> quadrature_weights(const std::vector<double>& nodes);

/// Throws DomainError when the trajectory has no De Giorgi samples.
EdiLedger edi_report(const Trajectory& traj, const EnvelopeOracle& oracle, double mass_floor = 0.0);

enum class ChainRuleChoice { tilde_f_of_sum, f_full };

/// Absolute defect of the discrete chain rule for g along the trajectory:
/// |G(final) - G(initial) - sum_k tau h sum_i (rho v (g_aa grad rho + g_ab
/// grad mu) + mu w (g_ab grad rho + g_bb grad mu))| evaluated at iterate k+1.
double chain_rule_check(const Trajectory& traj, ChainRuleChoice choice, const EnvelopeOracle& oracle);

}  // namespace crossflow
