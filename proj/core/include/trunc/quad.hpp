#pragma once

#include <functional>

namespace trunctest {

/// Adaptive Gauss-Kronrod 15(7) quadrature on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, int max_depth = 60);

/// Integral over [a, +inf), mapped to a finite interval.
double integrate_upper(const std::function<double(double)>& f, double a,
                       double rel_tol = 1e-10);

}  // namespace trunctest
