#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "crossflow/error.hpp"
#include "crossflow/presets.hpp"

using namespace crossflow;

TEST(Grid, Geometry) {
  const Grid1D g = make_grid(8, 2.0);
  EXPECT_DOUBLE_EQ(g.h(), 0.25);
  EXPECT_DOUBLE_EQ(g.center(0), 0.125);
  EXPECT_DOUBLE_EQ(g.left(8), 2.0);
  EXPECT_THROW(make_grid(0, 1.0), InvalidDensity);
  EXPECT_THROW(make_grid(8, -1.0), InvalidDensity);
}

TEST(Grid, NormalizedAndValidate) {
  const Grid1D g = make_grid(4, 1.0);
  const Density d = normalized(g, {1.0, 3.0, 0.0, 4.0});
  EXPECT_NEAR(d.mass(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(d.values[1], 1.5);
  EXPECT_NO_THROW(validate(d));
  EXPECT_THROW(normalized(g, {1.0, -1.0, 1.0, 1.0}), InvalidDensity);
  EXPECT_THROW(normalized(g, {0.0, 0.0, 0.0, 0.0}), InvalidDensity);
  EXPECT_THROW(normalized(g, {1.0, 1.0}), InvalidDensity);
  EXPECT_THROW(validate(Density{g, {1.0, 1.0, 1.0, 2.0}}), InvalidDensity);
  EXPECT_THROW(validate(Density{g, {1.0, NAN, 1.0, 1.0}}), InvalidDensity);
  const DensityPair mismatched{uniform_density(g), uniform_density(make_grid(5, 1.0))};
  EXPECT_THROW(validate(mismatched), GridMismatch);
}

TEST(Grid, ForwardDifference) {
  const std::vector<double> v{1.0, 2.0, 4.0, 7.0};
  const auto d = forward_difference(v, 0.5);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_DOUBLE_EQ(d[0], 2.0);
  EXPECT_DOUBLE_EQ(d[2], 6.0);
}

TEST(Grid, PairwiseSumIsChunkIndependent) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(1000);
  for (double& x : v) x = unif(rng);
  long double ref = 0.0L;
  for (double x : v) ref += x;
  EXPECT_NEAR(pairwise_sum(v), static_cast<double>(ref), 1e-13);
  EXPECT_EQ(pairwise_sum(v), pairwise_sum(std::vector<double>(v)));
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Presets, UnitMassAndShape) {
  for (double L : {0.75, 1.0, 1.5}) {
    const Grid1D g = make_grid(128, L);
    for (const auto& name : preset_names()) {
      const DensityPair p = make_preset(name, g);
      EXPECT_NO_THROW(validate(p)) << name << " L=" << L;
    }
  }
  EXPECT_THROW(make_preset("nope", make_grid(16, 1.0)), DomainError);
}

TEST(Presets, ProductLevels) {
  const Grid1D g = make_grid(128, 1.0);
  auto peak = [](const DensityPair& p) {
    double m = 0.0;
    for (int i = 0; i < p.grid().n_cells; ++i) m = std::max(m, p.rho.values[i] * p.mu.values[i]);
    return m;
  };
  EXPECT_LT(peak(make_preset("two_bumps", g)), 1.0);
  EXPECT_NEAR(peak(make_preset("supercritical", g)), 4.0, 1e-9);
  EXPECT_THROW(make_preset("supercritical", make_grid(128, 3.0)), InvalidDensity);
}

TEST(Presets, GaussianCellAveragesMatchErf) {
  const Grid1D g = make_grid(64, 1.0);
  const Density d = gaussian_bump(g, 0.3, 0.05);
  // Unrenormalized mass of the Gaussian inside [0, 1].
  const double inside = 0.5 * (std::erf(0.7 / (0.05 * std::sqrt(2.0))) + std::erf(0.3 / (0.05 * std::sqrt(2.0))));
  const int i = 20;
  const double a = g.left(i), b = g.left(i + 1);
  const double cell = 0.5 * (std::erf((b - 0.3) / (0.05 * std::sqrt(2.0))) - std::erf((a - 0.3) / (0.05 * std::sqrt(2.0))));
  EXPECT_NEAR(d.values[i], cell / (inside * g.h()), 1e-12);
}

TEST(Presets, IndicatorPartialCells) {
  const Grid1D g = make_grid(10, 1.0);
  const Density d = indicator_density(g, 0.25, 0.75);
  EXPECT_NEAR(d.values[2], 1.0, 1e-14);
  EXPECT_NEAR(d.values[3], 2.0, 1e-14);
  EXPECT_NEAR(d.values[7], 1.0, 1e-14);
  EXPECT_EQ(d.values[8], 0.0);
}
