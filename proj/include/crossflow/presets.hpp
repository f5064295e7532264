#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crossflow/grid.hpp"

namespace crossflow {

/// Cell averages of a Gaussian restricted to [0, L], renormalized to unit mass.
Density gaussian_bump(const Grid1D& grid, double center, double sigma);

/// Cell averages of (1 + amp cos(pi x / L)) / L.
Density cosine_profile(const Grid1D& grid, double amp);

Density uniform_density(const Grid1D& grid);

/// Indicator of [x0, x1) with exact partial-cell weights, unit mass.
Density indicator_density(const Grid1D& grid, double x0, double x1);

/// Named initial data:
///   uniform        rho = mu = 1 / L
///   two_bumps      Gaussians at L/4 (rho) and 3L/4 (mu), sigma = L/16
///   step_overlap   rho on [0, 0.6 L), mu on [0.4 L, L)
///   supercritical  Gaussians at L/2 -+ L/16 with sigma tuned so max rho mu = 4
///   smooth_a       cosine profiles with amplitudes 0.5 and 0.25; in the
///                  A region when L <= 0.5
///   smooth_b       cosine profiles at half mass density scale; in the B
///                  region when L >= 2
DensityPair make_preset(std::string_view name, const Grid1D& grid);

const std::vector<std::string>& preset_names();

}  // namespace crossflow
