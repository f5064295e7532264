#pragma once

// Convex envelope of f0(a, b) = a log a + b log b + a b on the closed quadrant.
//
// Along each diagonal a + b = s the restriction g(a) = f0(a, s - a) is convex
// for s <= 2 and a symmetric double well for s > 2.  Its two minimizers are
// written alpha(s) < s/2 < beta(s).  Writing alpha = s/2 - x, beta = s/2 + x,
// the stationarity condition log(alpha) + beta = log(beta) + alpha becomes
// atanh(2x/s) = x, i.e. s = 2 x coth(x).  The map x -> 2 x coth(x) is smooth
// and strictly increasing on (0, inf) with value 2 at x = 0, so every
// quantity of the envelope is computed from the half gap x rather than from a
// root find on g' (which degenerates as the wells merge at s = 2).

#include <array>
#include <cstdint>

namespace crossflow {

enum class Region : std::uint8_t { A, B };

const char* to_string(Region r) noexcept;

double f0(double a, double b);

/// g(a) = f0(a, s - a) and its first two derivatives in a, for 0 < a < s.
double g_value(double a, double s);
double g_prime(double a, double s);
double g_second(double a, double s);

struct EnvelopeOptions {
  double newton_tol = 1e-12;
  /// Below this value of s the half gap comes from its series in (s - 2)
  /// instead of Newton iterations.
  double s_switch = 2.0 + 1e-10;
};

/// Minimizers of g on the diagonal a + b = s.
struct Minimizers {
  double alpha = 1.0;
  double beta = 1.0;
  double half_gap = 0.0;   // x = (beta - alpha) / 2
  double log_alpha = 0.0;  // accurate even when alpha underflows
  double log_beta = 0.0;
  bool series = false;     // x came from the small-gap series
};

/// Everything the JKO prox needs at one point, from a single root solve.
struct PointEval {
  Region region = Region::B;
  double value = 0.0;
  double fa = 0.0;
  double fb = 0.0;
  /// f~''(a + b) on A; unused on B where the Hessian is [[1/a, 1], [1, 1/b]].
  double curvature = 0.0;
};

struct R0Scan {
  double value = 0.0;    // min of s f~''(s) over the scan grid
  double argmin = 0.0;
  double at_left = 0.0;  // s f~''(s) at the smallest scanned s
  double at_right = 0.0; // s f~''(s) at s = 1e4
  int points = 0;
};

class EnvelopeOracle {
 public:
  explicit EnvelopeOracle(EnvelopeOptions options = {});

  const EnvelopeOptions& options() const noexcept { return options_; }

  Minimizers alpha_beta(double s) const;

  double pi_value(double s) const;
  /// Closed form -pi (s - 2) / (s - 2 pi); the limit -1/2 at s = 2.
  double pi_prime(double s) const;

  double tilde_f(double s) const;
  double tilde_f_prime(double s) const;
  /// (1 - pi) / (s - 2 pi); returns the limit 1/4 at s = 2.
  double tilde_f_second(double s) const;

  Region classify(double a, double b) const;

  double f_value(double a, double b) const;
  /// On B the gradient of f0; on A (f~'(s), f~'(s)).  A zero coordinate
  /// inside B yields -infinity in the matching component.
  std::array<double, 2> f_grad(double a, double b) const;

  /// Product function: pi(a + b) on A, a b on B.
  double product(double a, double b) const;

  PointEval evaluate(double a, double b) const;
  /// Same as evaluate() but takes log a and log b so that underflowed
  /// coordinates keep an exact logarithm.
  PointEval evaluate_log(double log_a, double log_b) const;

  /// inf_{s > 2} s f~''(s), measured on a scan grid at construction.
  double r0() const noexcept { return r0_.value; }
  const R0Scan& r0_scan() const noexcept { return r0_; }

 private:
  struct Diagonal;
  Diagonal diagonal(double s) const;
  R0Scan scan_r0() const;

  EnvelopeOptions options_;
  R0Scan r0_;
};

}  // namespace crossflow
