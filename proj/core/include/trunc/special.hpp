#pragma once

namespace trunctest {

/// Standard normal density.
double norm_pdf(double x);
double log_norm_pdf(double x);

/// Standard normal CDF, accurate in both tails (erfc based).
double norm_cdf(double x);

/// Upper tail 1 - Phi(x), without cancellation for large x.
double norm_sf(double x);

/// Inverse standard normal CDF. Rational approximation refined with one
/// Newton step; relative error near 1e-15 over (0,1).
double inv_norm_cdf(double p);

/// Mills ratio (1 - Phi(b)) / phi(b). Uses a continued fraction for large b
/// where the quotient of two underflowing quantities loses all precision.
double mills_ratio(double b);

/// Regularized lower incomplete gamma P(a,x) and upper Q(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// log P(a,x), usable deep in the left tail where P underflows.
double log_gamma_p(double a, double x);

/// Chi-square distribution with k degrees of freedom.
double chi2_cdf(double k, double x);
double chi2_sf(double k, double x);
double chi2_logpdf(double k, double x);
/// Inverse CDF via bisection on gamma_p.
double chi2_quantile(double k, double p);

/// sqrt(2/pi) * min(eps, 1-eps), a lower bound on the Gaussian isoperimetric
/// function phi(Phi^-1(eps)); `isoperimetric_value` is the function itself.
double gaussian_isoperimetric_lb(double eps);
double gaussian_isoperimetric_value(double eps);

}  // namespace trunctest
