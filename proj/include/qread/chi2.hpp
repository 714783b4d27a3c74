#pragma once

#include "qread/errors.hpp"

namespace qread {

/// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
/// Series for x < a + 1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Chi-square distribution with k degrees of freedom.
double chi2_cdf(double x, int k);
/// Upper tail 1 - chi2_cdf(x, k), computed without cancellation.
double chi2_sf(double x, int k);
/// x with chi2_cdf(x, k) = p, p in (0,1).
double chi2_quantile(double p, int k);
/// x with chi2_sf(x, k) = q, q in (0,1).
double chi2_isf(double q, int k);

}  // namespace qread
