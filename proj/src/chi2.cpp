#include "qread/chi2.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace qread {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr double kQuantileTol = 1e-10;

void check_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("gamma shape must be positive");
  if (!(x >= 0.0) || std::isnan(x)) throw DomainError("gamma argument must be >= 0");
}

// log(x^a e^-x / Gamma(a))
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// P(a,x) by its power series; valid for x < a + 1.
double series_p(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) {
      return sum * std::exp(log_prefactor(a, x));
    }
  }
  throw NumericError("incomplete gamma series did not converge");
}

// Q(a,x) by modified Lentz continued fraction; valid for x >= a + 1.
double continued_fraction_q(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return std::exp(log_prefactor(a, x)) * h;
  }
  throw NumericError("incomplete gamma continued fraction did not converge");
}

void check_dof(int k) {
  if (k < 1) throw DomainError("degrees of freedom must be >= 1");
}

// Bisection for the root of the increasing function f on [0, inf).
double invert_increasing(const std::function<double(double)>& f, double target) {
  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (f(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 1100) throw NumericError("chi2 quantile bracket failed");
  }
  for (int i = 0; i < 400 && hi - lo > kQuantileTol * std::max(1.0, lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? series_p(a, x) : 1.0 - continued_fraction_q(a, x);
}

double gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - series_p(a, x) : continued_fraction_q(a, x);
}

double chi2_cdf(double x, int k) {
  check_dof(k);
  return gamma_p(0.5 * k, 0.5 * x);
}

double chi2_sf(double x, int k) {
  check_dof(k);
  return gamma_q(0.5 * k, 0.5 * x);
}

double chi2_quantile(double p, int k) {
  check_dof(k);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must lie in (0,1)");
  if (p > 0.5) return chi2_isf(1.0 - p, k);
  return invert_increasing([k](double x) { return chi2_cdf(x, k); }, p);
}

double chi2_isf(double q, int k) {
  check_dof(k);
  if (!(q > 0.0 && q < 1.0)) throw DomainError("probability must lie in (0,1)");
  if (q > 0.5) return chi2_quantile(1.0 - q, k);
  return invert_increasing([k](double x) { return -chi2_sf(x, k); }, -q);
}

}  // namespace qread
