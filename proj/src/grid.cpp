#include "crossflow/grid.hpp"

#include <cmath>
#include <sstream>

#include "crossflow/error.hpp"

namespace crossflow {

Grid1D make_grid(int n_cells, double length) {
  if (n_cells < 1 || !(length > 0.0)) {
    std::ostringstream msg;
    msg << "grid needs n_cells >= 1 and length > 0, got " << n_cells << ", " << length;
    throw InvalidDensity(msg.str());
  }
  return Grid1D{n_cells, length};
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double Density::mass() const { return grid.h() * pairwise_sum(values); }

Density normalized(const Grid1D& grid, std::vector<double> values) {
  if (static_cast<int>(values.size()) != grid.n_cells) {
    throw InvalidDensity("density size does not match grid");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidDensity("density values must be finite and nonnegative");
    }
  }
  Density d{grid, std::move(values)};
  const double m = d.mass();
  if (!(m > 0.0)) {
    throw InvalidDensity("density has zero mass");
  }
  for (double& v : d.values) v /= m;
  return d;
}

void validate(const Density& d, double mass_tol) {
  if (static_cast<int>(d.values.size()) != d.grid.n_cells) {
    throw InvalidDensity("density size does not match grid");
  }
  for (double v : d.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidDensity("density values must be finite and nonnegative");
    }
  }
  const double m = d.mass();
  if (!(m > 0.0)) {
    throw InvalidDensity("density has zero mass");
  }
  if (std::abs(m - 1.0) > mass_tol) {
    std::ostringstream msg;
    msg << "density mass " << m << " differs from 1 by more than " << mass_tol;
    throw InvalidDensity(msg.str());
  }
}

std::vector<double> DensityPair::sum() const {
  std::vector<double> s(rho.values.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = rho.values[i] + mu.values[i];
  return s;
}

void validate(const DensityPair& p, double mass_tol) {
  if (!(p.rho.grid == p.mu.grid)) {
    throw GridMismatch("rho and mu live on different grids");
  }
  validate(p.rho, mass_tol);
  validate(p.mu, mass_tol);
}

std::vector<double> forward_difference(std::span<const double> v, double h) {
  std::vector<double> d;
  if (v.size() < 2) return d;
  d.resize(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) d[i] = (v[i + 1] - v[i]) / h;
  return d;
}

}  // namespace crossflow
