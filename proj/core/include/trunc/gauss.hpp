#pragma once

#include <Eigen/Dense>

#include "trunc/batch.hpp"
#include "trunc/rng.hpp"

namespace trunctest {

/// T i.i.d. rows from N(0, I_n). Row i draws from substream i of `rng`, so
/// the result is identical whether rows are filled sequentially or in
/// parallel.
SampleBatch gaussian_batch(int n, int count, const RngStream& rng);

/// Haar-random unit vector on S^{n-1}.
Eigen::VectorXd unit_sphere(int n, RngStream& rng);

/// One draw from N(0,1) restricted to [lo, hi]; pass +-infinity for an
/// unbounded side. Inverse-CDF sampling, parametrized in whichever tail
/// carries the interval so that cuts out to lo ~ 8 stay exact.
double truncated_normal_1d(double lo, double hi, RngStream& rng);

}  // namespace trunctest
