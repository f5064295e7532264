#pragma once

// Quadratic optimal transport between cell-average densities on [0, L].
//
// Each density has a piecewise-affine CDF, so its quantile function is
// piecewise affine in q.  Merging the quantile breakpoints of source and
// target gives segments on which both quantiles are affine, and every integral
// over q below is exact on those segments.

#include <vector>

#include "crossflow/grid.hpp"

namespace crossflow {

struct TransportResult {
  double w2_squared = 0.0;
  /// Monotone map T = F_target^{-1} o F_source at cell centers.
  std::vector<double> map_values;
  /// Cell-level displacement id - T.  On a cell with source mass m_i the
  /// value is sign(d_i) * sqrt(c_i / m_i), where c_i and d_i are the transport
  /// cost and the signed displacement integrated over the cell's quantile
  /// range.  Consequently h * sum(source_i * potential_grad_i^2) equals
  /// w2_squared exactly.  Cells without source mass use x_i - T(x_i).
  std::vector<double> potential_grad;
};

TransportResult quantile_w2(const Density& source, const Density& target);

/// Pushforward of `source` under (1 - t) id + t T, binned conservatively.
Density displacement_interpolate(const Density& source, const Density& target, double t);

struct SinkhornOptions {
  double eps_reg = 1e-4;
  int max_iter = 100000;
  double tol = 1e-9;
};

struct SinkhornResult {
  /// w2_squared is <C, plan> without the entropy term; map_values is the
  /// barycentric projection of the plan.
  TransportResult transport;
  /// Row-major n x n coupling of cell masses (sums to 1).
  std::vector<double> plan;
  int iterations = 0;
  double marginal_error = 0.0;
};

/// Log-domain entropic transport between the cell masses at cell centers.
/// Throws ConvergenceError with the final L1 marginal error after max_iter.
SinkhornResult sinkhorn_w2(const Density& source, const Density& target,
                           const SinkhornOptions& options);

}  // namespace crossflow
