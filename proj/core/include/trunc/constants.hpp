#pragma once

#include <cstddef>

namespace trunctest {

/// Numeric tolerances and algorithm constants, collected in one place so the
/// tests and the CLI agree on the values they probe.
struct Defaults {
    // linear algebra
    double symmetry_tol = 1e-12;        // relative, PsdMatrix symmetry check
    double chol_pivot_tol = 1e-12;      // times max diagonal entry
    // bodies
    double hyperplane_eps = 1e-9;       // |v.x| tolerance for membership
    double unit_norm_tol = 1e-12;
    // samplers
    std::size_t rejection_max_attempts = 1'000'000;
    int chi2_quantile_iters = 60;
    double chi2_quantile_tol = 1e-13;
    // testers; the distinguisher constants are operational choices, the
    // analysis only proves that suitable constants exist.
    double c_sym = 1.5;                 // M threshold: n - c_sym*eps/2
    double c_sample = 8.0;              // T = ceil(c_sample*n/eps^2)
    double l_threshold = 0.05;          // ||L||^2 cutoff
    double mean_estimator_delta = 0.01;
    double calibration_alpha = 0.1;     // target type-I error
    // quadrature
    double quad_rel_tol = 1e-10;
};

inline const Defaults& defaults() {
    static const Defaults d{};
    return d;
}

}  // namespace trunctest
