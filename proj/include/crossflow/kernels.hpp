#pragma once

// Heavy-tailed mollifier on the unit torus and the positive-part H1 estimate
// for mollified functions.
//
// The profile is eta~(x) = c_m (1 + |x|)^-m with c_m = (m - 1) / 2, so it has
// unit mass for every m > 1.  eta_eps(x) = eta~(x / eps) / eps is periodized
// over the integer lattice.  The lattice sum has the closed form
//
//   eta_eps(x) = c_m eps^(m-1) [zeta(m, eps + x) + zeta(m, 1 + eps - x)],  x in [0, 1],
//
// with zeta the Hurwitz zeta function, so no truncation is needed.

#include <cstdint>
#include <string>
#include <vector>

#include "crossflow/grid.hpp"

namespace crossflow {

/// Samples of the periodized kernel on the lattice offsets x_k = k h,
/// k = 0 .. n-1.  Each sample is the exact average over [x_k - h/2, x_k + h/2];
/// averages keep the mass exact and preserve the pointwise inequalities.
/// second_deriv_pos excludes the point mass of eta'' at the origin.
struct Mollifier {
  double m = 3.0;
  double eps = 0.1;
  Grid1D grid;
  std::vector<double> values;
  std::vector<double> deriv_values;
  std::vector<double> second_deriv_pos;

  /// Pointwise periodized eta_eps, eta_eps' and the smooth part of eta_eps''.
  double eval(double x) const;
  double eval_deriv(double x) const;
  double eval_second_pos(double x) const;
};

/// c_m (1 + |x|)^-m.
double kernel_profile(double m, double x);

/// Throws DomainError unless m > 2, 0 < eps <= 1 and the grid is the unit torus.
Mollifier make_mollifier(double m, double eps, const Grid1D& grid);

/// (k * u)_i = h sum_j k_{(i - j) mod n} u_j.  Throws GridMismatch on size.
std::vector<double> convolve(const std::vector<double>& u, const std::vector<double>& kernel_samples,
                             const Grid1D& grid);
std::vector<double> convolve(const std::vector<double>& u, const Mollifier& kernel);

/// ||((u_eps - c)+)'||_2 c / (||u+||_inf ||(u+)'||_2) with periodic forward
/// differences; 0 when either u+ or (u_eps - c)+ vanishes.  Throws DomainError
/// for c <= 0.
double h1conv_ratio(const std::vector<double>& u, double c, const Mollifier& kernel);

struct CorpusField {
  std::string name;
  std::vector<double> values;
};

/// Sweep corpus sampled at cell centers of an n-cell unit torus: an
/// asymmetric sawtooth with deep wells, a bump minus a narrow spike and three
/// random Fourier fields with H1-summable coefficients.  The random
/// coefficients depend on the seed only, so refinements sample the same fields.
std::vector<CorpusField> sweep_corpus(int n, std::uint64_t seed);

/// Fractions of ||u+||_inf used as levels c.
std::vector<double> sweep_levels();

struct SweepArgmax {
  std::string u_name;
  double c = 0.0;
  double eps = 0.0;
};

struct KernelCertification {
  double m = 3.0;
  std::vector<double> eps_list;
  std::vector<std::string> corpus;
  int n_coarse = 0;
  int n_fine = 0;
  /// Max over the corpus, levels and eps at n_fine.
  double max_ratio = 0.0;
  double max_ratio_coarse = 0.0;
  SweepArgmax argmax;
  /// max_ratio / max_ratio_coarse.
  double refinement_ratio = 0.0;
};

/// Runs the sweep at n_coarse and 2 n_coarse.  Results do not depend on `threads`.
KernelCertification certify_h1conv(double m, const std::vector<double>& eps_list, int n_coarse,
                                   std::uint64_t seed, int threads);

}  // namespace crossflow
