#include "crossflow/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crossflow/error.hpp"

namespace crossflow {

Density gaussian_bump(const Grid1D& grid, double center, double sigma) {
  std::vector<double> v(grid.n_cells);
  const double scale = 1.0 / (std::numbers::sqrt2 * sigma);
  for (int i = 0; i < grid.n_cells; ++i) {
    const double lo = (grid.left(i) - center) * scale;
    const double hi = (grid.left(i + 1) - center) * scale;
    // erfc differences keep precision in the far tails
    v[i] = lo > 0.0 ? 0.5 * (std::erfc(lo) - std::erfc(hi)) : 0.5 * (std::erfc(-hi) - std::erfc(-lo));
  }
  return normalized(grid, std::move(v));
}

Density cosine_profile(const Grid1D& grid, double amp) {
  std::vector<double> v(grid.n_cells);
  const double L = grid.length;
  const double k = std::numbers::pi / L;
  for (int i = 0; i < grid.n_cells; ++i) {
    const double avg_cos = (std::sin(k * grid.left(i + 1)) - std::sin(k * grid.left(i))) / (k * grid.h());
    v[i] = (1.0 + amp * avg_cos) / L;
  }
  return normalized(grid, std::move(v));
}

Density uniform_density(const Grid1D& grid) {
  return Density{grid, std::vector<double>(grid.n_cells, 1.0 / grid.length)};
}

Density indicator_density(const Grid1D& grid, double x0, double x1) {
  std::vector<double> v(grid.n_cells, 0.0);
  for (int i = 0; i < grid.n_cells; ++i) {
    const double lo = std::max(x0, grid.left(i));
    const double hi = std::min(x1, grid.left(i + 1));
    if (hi > lo) v[i] = (hi - lo) / grid.h();
  }
  return normalized(grid, std::move(v));
}

namespace {

double max_product(const Density& a, const Density& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, a.values[i] * b.values[i]);
  return m;
}

DensityPair supercritical(const Grid1D& grid) {
  const double L = grid.length;
  const double c1 = 0.5 * L - L / 16.0;
  const double c2 = 0.5 * L + L / 16.0;
  // The peak product is unimodal in sigma with its maximum near L/16 and
  // tends to 1/L^2 for wide bumps; bisect on the wide side.
  double lo = L / 16.0;
  double hi = 2.0 * L;
  const double target = 4.0;
  auto peak = [&](double sigma) {
    return max_product(gaussian_bump(grid, c1, sigma), gaussian_bump(grid, c2, sigma));
  };
  if (peak(lo) < target || peak(hi) > target) {
    throw InvalidDensity("supercritical preset cannot reach peak product 4 on this grid");
  }
  for (int it = 0; it < 100 && hi - lo > 1e-14 * L; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (peak(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double sigma = 0.5 * (lo + hi);
  return {gaussian_bump(grid, c1, sigma), gaussian_bump(grid, c2, sigma)};
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"uniform",       "two_bumps", "step_overlap",
                                              "supercritical", "smooth_a",  "smooth_b"};
  return names;
}

DensityPair make_preset(std::string_view name, const Grid1D& grid) {
  const double L = grid.length;
  if (name == "uniform") return {uniform_density(grid), uniform_density(grid)};
  if (name == "two_bumps") {
    return {gaussian_bump(grid, 0.25 * L, L / 16.0), gaussian_bump(grid, 0.75 * L, L / 16.0)};
  }
  if (name == "step_overlap") {
    return {indicator_density(grid, 0.0, 0.6 * L), indicator_density(grid, 0.4 * L, L)};
  }
  if (name == "supercritical") return supercritical(grid);
  if (name == "smooth_a") return {cosine_profile(grid, 0.5), cosine_profile(grid, 0.25)};
  if (name == "smooth_b") return {cosine_profile(grid, 0.5), cosine_profile(grid, -0.5)};
  throw DomainError("unknown preset '" + std::string(name) + "'");
}

}  // namespace crossflow
