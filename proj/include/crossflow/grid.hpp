#pragma once

#include <span>
#include <vector>

namespace crossflow {

/// Uniform cell-centred grid on [0, length].
struct Grid1D {
  int n_cells = 0;
  double length = 1.0;

  double h() const noexcept { return length / n_cells; }
  double center(int i) const noexcept { return (i + 0.5) * h(); }
  double left(int i) const noexcept { return i * h(); }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

Grid1D make_grid(int n_cells, double length);

/// Cell-average density on a grid.  Unit mass means h * sum(values) == 1.
struct Density {
  Grid1D grid;
  std::vector<double> values;

  double mass() const;
  int size() const noexcept { return grid.n_cells; }
};

/// Checks nonnegativity and size; rescales to unit mass.
Density normalized(const Grid1D& grid, std::vector<double> values);

/// Throws InvalidDensity unless values are finite, nonnegative and of unit
/// mass within `mass_tol`.
void validate(const Density& d, double mass_tol = 1e-12);

struct DensityPair {
  Density rho;
  Density mu;

  const Grid1D& grid() const noexcept { return rho.grid; }
  std::vector<double> sum() const;
};

void validate(const DensityPair& p, double mass_tol = 1e-12);

/// Forward differences (v[i+1] - v[i]) / h at the n - 1 interior interfaces.
/// Interface i sits between cells i and i + 1 and belongs to cell i.
std::vector<double> forward_difference(std::span<const double> v, double h);

/// Sum with a fixed pairwise tree so results do not depend on how callers
/// chunk the work.
double pairwise_sum(std::span<const double> v);

}  // namespace crossflow
