#include "crossflow/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crossflow/error.hpp"

namespace crossflow {

namespace {

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

// q(x) = x coth(x) - 1 and its derivative, with series near 0 where the
// direct formulas cancel.
double coth_excess(double x) {
  if (x < 0.05) {
    const double x2 = x * x;
    return x2 * (1.0 / 3.0 +
                 x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * 2.0 / 93555.0))));
  }
  return x / std::tanh(x) - 1.0;
}

double coth_excess_prime(double x) {
  if (x < 0.05) {
    const double x2 = x * x;
    return x * (2.0 / 3.0 +
                x2 * (-4.0 / 45.0 + x2 * (12.0 / 945.0 + x2 * (-8.0 / 4725.0 + x2 * 20.0 / 93555.0))));
  }
  if (x > 20.0) {
    return 1.0 / std::tanh(x) - 4.0 * x * std::exp(-2.0 * x);
  }
  const double sh = std::sinh(x);
  return 1.0 / std::tanh(x) - x / (sh * sh);
}

}  // namespace

const char* to_string(Region r) noexcept { return r == Region::A ? "A" : "B"; }

double f0(double a, double b) { return xlogx(a) + xlogx(b) + a * b; }

namespace {
void check_segment(double a, double s) {
  if (!(a > 0.0) || !(a < s)) {
    std::ostringstream msg;
    msg << "g requires 0 < a < s, got a=" << a << ", s=" << s;
    throw DomainError(msg.str());
  }
}
}  // namespace

double g_value(double a, double s) {
  check_segment(a, s);
  return f0(a, s - a);
}

double g_prime(double a, double s) {
  check_segment(a, s);
  return std::log(a) - std::log(s - a) + s - 2.0 * a;
}

double g_second(double a, double s) {
  check_segment(a, s);
  return 1.0 / a + 1.0 / (s - a) - 2.0;
}

struct EnvelopeOracle::Diagonal {
  Minimizers m;
  double pi = 1.0;
  double one_minus_pi = 0.0;  // 1 - pi
  double gap = 0.0;           // s - 2 pi
};

EnvelopeOracle::EnvelopeOracle(EnvelopeOptions options) : options_(options) { r0_ = scan_r0(); }

EnvelopeOracle::Diagonal EnvelopeOracle::diagonal(double s) const {
  if (!(s >= 2.0)) {
    std::ostringstream msg;
    msg << "alpha/beta are defined for s >= 2, got s=" << s;
    throw DomainError(msg.str());
  }
  Diagonal d;
  const double excess = s - 2.0;
  const double y = 0.5 * excess;  // target value of q(x)
  if (excess == 0.0) {
    return d;
  }

  double x = 0.0;
  if (s < options_.s_switch) {
    // Inverse series of q(x) = x^2/3 - x^4/45 + ...
    x = std::sqrt(3.0 * y + 0.6 * y * y);
    d.m.series = true;
  } else {
    double lo = 0.0;
    double hi = 0.5 * s;
    x = excess < 1.0 ? std::sqrt(3.0 * y + 0.6 * y * y) : std::min(hi, y + 1.0);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const double r = coth_excess(x) - y;
      if (r > 0.0) {
        hi = std::min(hi, x);
      } else {
        lo = std::max(lo, x);
      }
      double next = x - r / coth_excess_prime(x);
      if (!(next > lo && next < hi)) {
        next = 0.5 * (lo + hi);
      }
      const double step = std::abs(next - x);
      x = next;
      if (step <= 4.0 * std::numeric_limits<double>::epsilon() * x) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      const double r = coth_excess(x) - y;
      if (std::abs(r) > options_.newton_tol * std::max(1.0, y)) {
        throw ConvergenceError("half-gap Newton iteration did not converge", r);
      }
    }
  }

  const double two_x = 2.0 * x;
  double alpha = two_x / std::expm1(two_x);
  double log_alpha = 0.0;
  if (alpha > 1e-300) {
    log_alpha = std::log(alpha);
  } else {
    log_alpha = std::log(two_x) - two_x - std::log1p(-std::exp(-two_x));
    alpha = std::exp(log_alpha);
  }
  const double beta = s - alpha;
  d.m.alpha = alpha;
  d.m.beta = beta;
  d.m.half_gap = x;
  d.m.log_alpha = log_alpha;
  d.m.log_beta = std::log(beta);
  d.pi = alpha * beta;
  if (s < 3.0) {
    const double x2 = x * x;
    d.one_minus_pi = x2 - y * (2.0 + y);
    d.gap = 2.0 * (x2 - y * (1.0 + y));
  } else {
    d.one_minus_pi = 1.0 - d.pi;
    d.gap = s - 2.0 * d.pi;
  }
  return d;
}

Minimizers EnvelopeOracle::alpha_beta(double s) const { return diagonal(s).m; }

double EnvelopeOracle::pi_value(double s) const { return diagonal(s).pi; }

double EnvelopeOracle::pi_prime(double s) const {
  const Diagonal d = diagonal(s);
  if (d.gap == 0.0) {
    return -0.5;
  }
  return -d.pi * (s - 2.0) / d.gap;
}

double EnvelopeOracle::tilde_f(double s) const {
  const Diagonal d = diagonal(s);
  const double a_log_a = d.m.alpha > 0.0 ? d.m.alpha * d.m.log_alpha : 0.0;
  return a_log_a + d.m.beta * d.m.log_beta + d.pi;
}

double EnvelopeOracle::tilde_f_prime(double s) const {
  const Diagonal d = diagonal(s);
  return d.m.log_alpha + 1.0 + d.m.beta;
}

double EnvelopeOracle::tilde_f_second(double s) const {
  const Diagonal d = diagonal(s);
  if (d.gap == 0.0) {
    return 0.25;
  }
  return d.one_minus_pi / d.gap;
}

Region EnvelopeOracle::classify(double a, double b) const {
  const double s = a + b;
  if (s < 2.0) {
    return Region::B;
  }
  return std::min(a, b) >= diagonal(s).m.alpha ? Region::A : Region::B;
}

double EnvelopeOracle::f_value(double a, double b) const { return evaluate(a, b).value; }

std::array<double, 2> EnvelopeOracle::f_grad(double a, double b) const {
  const PointEval e = evaluate(a, b);
  return {e.fa, e.fb};
}

double EnvelopeOracle::product(double a, double b) const {
  const double s = a + b;
  if (s < 2.0) {
    return a * b;
  }
  const Diagonal d = diagonal(s);
  return std::min(a, b) >= d.m.alpha ? d.pi : a * b;
}

PointEval EnvelopeOracle::evaluate(double a, double b) const {
  const double inf = std::numeric_limits<double>::infinity();
  const double la = a > 0.0 ? std::log(a) : -inf;
  const double lb = b > 0.0 ? std::log(b) : -inf;
  PointEval out = evaluate_log(la, lb);
  if (out.region == Region::B) {
    // exp(log a) may differ from a in the last bit; keep f == f0 exactly on B.
    out.value = f0(a, b);
    out.fa = la + b + 1.0;
    out.fb = lb + a + 1.0;
  }
  return out;
}

PointEval EnvelopeOracle::evaluate_log(double log_a, double log_b) const {
  const double a = std::exp(log_a);
  const double b = std::exp(log_b);
  const double s = a + b;
  PointEval out;
  if (s >= 2.0) {
    const Diagonal d = diagonal(s);
    if (std::min(a, b) >= d.m.alpha) {
      out.region = Region::A;
      const double a_log_a = d.m.alpha > 0.0 ? d.m.alpha * d.m.log_alpha : 0.0;
      out.value = a_log_a + d.m.beta * d.m.log_beta + d.pi;
      out.fa = out.fb = d.m.log_alpha + 1.0 + d.m.beta;
      out.curvature = d.gap == 0.0 ? 0.25 : d.one_minus_pi / d.gap;
      return out;
    }
  }
  out.region = Region::B;
  out.value = (a > 0.0 ? a * log_a : 0.0) + (b > 0.0 ? b * log_b : 0.0) + a * b;
  out.fa = log_a + b + 1.0;
  out.fb = log_b + a + 1.0;
  return out;
}

R0Scan EnvelopeOracle::scan_r0() const {
  R0Scan scan;
  scan.value = std::numeric_limits<double>::infinity();
  auto visit = [&](double s) {
    const double v = s * tilde_f_second(s);
    if (v < scan.value) {
      scan.value = v;
      scan.argmin = s;
    }
    ++scan.points;
  };
  constexpr int kLogPoints = 10000;
  constexpr int kNearPoints = 1000;
  const double lo = std::log10(1e-8);
  const double hi = std::log10(1e4 - 2.0);
  for (int k = 0; k < kLogPoints; ++k) {
    const double t = lo + (hi - lo) * k / (kLogPoints - 1);
    visit(k == kLogPoints - 1 ? 1e4 : 2.0 + std::pow(10.0, t));
  }
  for (int k = 1; k <= kNearPoints; ++k) {
    visit(2.0 + 0.1 * k / kNearPoints);
  }
  scan.at_left = (2.0 + 1e-8) * tilde_f_second(2.0 + 1e-8);
  scan.at_right = 1e4 * tilde_f_second(1e4);
  return scan;
}

}  // namespace crossflow
