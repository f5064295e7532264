#include "crossflow/kernels.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "crossflow/error.hpp"
#include "crossflow/parallel.hpp"

namespace crossflow {

namespace {

double hzeta(double s, double q) {
  gsl_sf_result r;
  const int status = gsl_sf_hzeta_e(s, q, &r);
  if (status != GSL_SUCCESS) throw DomainError(std::string("hurwitz zeta: ") + gsl_strerror(status));
  return r.val;
}

// Sum over the images to the right (zeta(p, eps + x)) and to the left
// (zeta(p, 1 + eps - x)) of x in [0, 1].
struct Images {
  double right;
  double left;
};

Images images(double p, double eps, double x) { return {hzeta(p, eps + x), hzeta(p, 1.0 + eps - x)}; }

double wrap(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

// Antiderivative of eta, then eta, eta' and the smooth part of eta'' on
// [0, 1], all without the factor c_m eps^(m-1).  At x = 0 and x = 1 the
// derivative gives the one-sided limits from inside the interval.
double prim_eta(double m, double eps, double x) {
  const Images z = images(m - 1.0, eps, x);
  return (z.left - z.right) / (m - 1.0);
}

double eta_raw(double m, double eps, double x) {
  const Images z = images(m, eps, x);
  return z.right + z.left;
}

double deta_raw(double m, double eps, double x) {
  const Images z = images(m + 1.0, eps, x);
  return m * (z.left - z.right);
}

double d2eta_raw(double m, double eps, double x) {
  const Images z = images(m + 2.0, eps, x);
  return m * (m + 1.0) * (z.right + z.left);
}

std::vector<double> positive_part(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::max(x, 0.0); });
  return out;
}

// Discrete L2 norm of the periodic forward difference.
double h1_seminorm(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (v[(i + 1) % n] - v[i]) / h;
    sq[i] = d * d;
  }
  return std::sqrt(h * pairwise_sum(sq));
}

}  // namespace

double kernel_profile(double m, double x) { return 0.5 * (m - 1.0) * std::pow(1.0 + std::abs(x), -m); }

double Mollifier::eval(double x) const {
  return 0.5 * (m - 1.0) * std::pow(eps, m - 1.0) * eta_raw(m, eps, wrap(x));
}

double Mollifier::eval_deriv(double x) const {
  return 0.5 * (m - 1.0) * std::pow(eps, m - 1.0) * deta_raw(m, eps, wrap(x));
}

double Mollifier::eval_second_pos(double x) const {
  return 0.5 * (m - 1.0) * std::pow(eps, m - 1.0) * d2eta_raw(m, eps, wrap(x));
}

Mollifier make_mollifier(double m, double eps, const Grid1D& grid) {
  if (!(m > 2.0)) throw DomainError("mollifier needs m > 2");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("mollifier needs 0 < eps <= 1");
  if (grid.n_cells < 2 || grid.length != 1.0) throw DomainError("mollifier lives on the unit torus");
  gsl_set_error_handler_off();

  Mollifier k;
  k.m = m;
  k.eps = eps;
  k.grid = grid;
  const int n = grid.n_cells;
  const double h = grid.h();
  const double scale = 0.5 * (m - 1.0) * std::pow(eps, m - 1.0);
  k.values.resize(n);
  k.deriv_values.resize(n);
  k.second_deriv_pos.resize(n);

  // Cell i spans [(i - 1/2) h, (i + 1/2) h]; cell 0 wraps around the origin.
  std::vector<double> p(n), e(n), d(n);
  for (int j = 0; j < n; ++j) {
    const double x = (j + 0.5) * h;
    p[j] = prim_eta(m, eps, x);
    e[j] = eta_raw(m, eps, x);
    d[j] = deta_raw(m, eps, x);
  }
  const double p0 = prim_eta(m, eps, 0.0), p1 = prim_eta(m, eps, 1.0);
  const double e0 = eta_raw(m, eps, 0.0), e1 = eta_raw(m, eps, 1.0);
  const double d0 = deta_raw(m, eps, 0.0), d1 = deta_raw(m, eps, 1.0);
  const double ph = prim_eta(m, eps, 1.0 - 0.5 * h);
  const double eh = eta_raw(m, eps, 1.0 - 0.5 * h);
  const double dh = deta_raw(m, eps, 1.0 - 0.5 * h);

  k.values[0] = scale * (p[0] - p0 + p1 - ph) / h;
  k.deriv_values[0] = scale * (e[0] - e0 + e1 - eh) / h;
  k.second_deriv_pos[0] = scale * (d[0] - d0 + d1 - dh) / h;
  for (int i = 1; i < n; ++i) {
    k.values[i] = scale * (p[i] - p[i - 1]) / h;
    k.deriv_values[i] = scale * (e[i] - e[i - 1]) / h;
    k.second_deriv_pos[i] = scale * (d[i] - d[i - 1]) / h;
  }
  return k;
}

std::vector<double> convolve(const std::vector<double>& u, const std::vector<double>& kernel_samples,
                             const Grid1D& grid) {
  const int n = grid.n_cells;
  if (static_cast<int>(u.size()) != n || static_cast<int>(kernel_samples.size()) != n) {
    throw GridMismatch("convolution operands must match the kernel grid");
  }
  const double h = grid.h();
  std::vector<double> out(n), terms(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) terms[j] = kernel_samples[(i - j + n) % n] * u[j];
    out[i] = h * pairwise_sum(terms);
  }
  return out;
}

std::vector<double> convolve(const std::vector<double>& u, const Mollifier& kernel) {
  return convolve(u, kernel.values, kernel.grid);
}

double h1conv_ratio(const std::vector<double>& u, double c, const Mollifier& kernel) {
  if (!(c > 0.0)) throw DomainError("h1conv_ratio needs c > 0");
  const double h = kernel.grid.h();
  const std::vector<double> up = positive_part(u);
  const double sup = *std::max_element(up.begin(), up.end());
  if (sup == 0.0) return 0.0;
  std::vector<double> shifted = convolve(u, kernel);
  for (double& v : shifted) v = std::max(v - c, 0.0);
  const double num = h1_seminorm(shifted, h);
  const double den = h1_seminorm(up, h);
  // den == 0 means u is constant, so u_eps is too; num is then rounding only.
  if (num == 0.0 || den == 0.0) return 0.0;
  return num * c / (sup * den);
}

std::vector<CorpusField> sweep_corpus(int n, std::uint64_t seed) {
  const double h = 1.0 / n;
  std::vector<CorpusField> out;

  CorpusField saw{"sawtooth_wells", std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    const double t = std::fmod(4.0 * (i + 0.5) * h, 1.0);
    saw.values[i] = t < 0.8 ? -4.0 + 5.0 * t / 0.8 : 1.0 - 25.0 * (t - 0.8);
  }
  out.push_back(std::move(saw));

  CorpusField bump{"bump_minus_spike", std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    const double y = (i + 0.5) * h - 0.5;
    bump.values[i] = std::exp(-y * y / (2.0 * 0.1 * 0.1)) - 3.0 * std::exp(-y * y / (2.0 * 0.01 * 0.01));
  }
  out.push_back(std::move(bump));

  constexpr int kModes = 12;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int f = 0; f < 3; ++f) {
    std::vector<double> a(kModes + 1), b(kModes + 1);
    for (int k = 1; k <= kModes; ++k) {
      a[k] = normal(rng) / std::pow(k, 1.5);
      b[k] = normal(rng) / std::pow(k, 1.5);
    }
    CorpusField field{"random_fourier_" + std::to_string(f), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
      const double x = 2.0 * std::numbers::pi * (i + 0.5) * h;
      double v = 0.0;
      for (int k = 1; k <= kModes; ++k) v += a[k] * std::cos(k * x) + b[k] * std::sin(k * x);
      field.values[i] = v;
    }
    out.push_back(std::move(field));
  }
  return out;
}

std::vector<double> sweep_levels() { return {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0}; }

namespace {

struct SweepMax {
  double ratio = 0.0;
  SweepArgmax at;
};

SweepMax sweep(double m, const std::vector<double>& eps_list, int n, std::uint64_t seed, int threads,
               std::vector<std::string>* names) {
  const Grid1D grid = make_grid(n, 1.0);
  const std::vector<CorpusField> corpus = sweep_corpus(n, seed);
  if (names) {
    names->clear();
    for (const auto& f : corpus) names->push_back(f.name);
  }
  std::vector<Mollifier> kernels;
  for (double eps : eps_list) kernels.push_back(make_mollifier(m, eps, grid));
  const std::vector<double> levels = sweep_levels();

  const int pairs = static_cast<int>(corpus.size() * eps_list.size());
  std::vector<SweepMax> best(pairs);
  parallel_for(pairs, threads, [&](int idx) {
    const CorpusField& field = corpus[idx / eps_list.size()];
    const std::size_t e = idx % eps_list.size();
    const double sup = std::max(0.0, *std::max_element(field.values.begin(), field.values.end()));
    for (double frac : levels) {
      const double c = frac * sup;
      if (c <= 0.0) continue;
      const double r = h1conv_ratio(field.values, c, kernels[e]);
      if (r > best[idx].ratio) best[idx] = {r, {field.name, c, eps_list[e]}};
    }
  });
  SweepMax out;
  for (const auto& b : best) {
    if (b.ratio > out.ratio) out = b;
  }
  return out;
}

}  // namespace

KernelCertification certify_h1conv(double m, const std::vector<double>& eps_list, int n_coarse,
                                   std::uint64_t seed, int threads) {
  KernelCertification cert;
  cert.m = m;
  cert.eps_list = eps_list;
  cert.n_coarse = n_coarse;
  cert.n_fine = 2 * n_coarse;
  const SweepMax coarse = sweep(m, eps_list, n_coarse, seed, threads, nullptr);
  const SweepMax fine = sweep(m, eps_list, cert.n_fine, seed, threads, &cert.corpus);
  cert.max_ratio_coarse = coarse.ratio;
  cert.max_ratio = fine.ratio;
  cert.argmax = fine.at;
  cert.refinement_ratio = coarse.ratio > 0.0 ? fine.ratio / coarse.ratio : 0.0;
  return cert;
}

}  // namespace crossflow
