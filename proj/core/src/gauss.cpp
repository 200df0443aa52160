#include "trunc/gauss.hpp"

#include <cmath>

#include "trunc/errors.hpp"
#include "trunc/special.hpp"

namespace trunctest {

SampleBatch gaussian_batch(int n, int count, const RngStream& rng) {
    if (n < 1) throw InvalidArgument("gaussian_batch: n must be >= 1");
    if (count < 1) throw InvalidArgument("gaussian_batch: T must be >= 1");
    SampleBatch batch;
    batch.data.resize(count, n);
    batch.master_seed = rng.master_seed();
    batch.stream_index = rng.stream_index();
    for (int i = 0; i < count; ++i) {
        RngStream row = rng.substream(static_cast<std::uint64_t>(i));
        for (int j = 0; j < n; ++j) batch.data(i, j) = row.normal();
    }
    return batch;
}

Eigen::VectorXd unit_sphere(int n, RngStream& rng) {
    if (n < 1) throw InvalidArgument("unit_sphere: n must be >= 1");
    Eigen::VectorXd v(n);
    double norm = 0.0;
    do {
        for (int j = 0; j < n; ++j) v[j] = rng.normal();
        norm = v.norm();
    } while (norm == 0.0);
    return v / norm;
}

double truncated_normal_1d(double lo, double hi, RngStream& rng) {
    if (!(lo < hi)) throw EmptyInterval("truncated_normal_1d: lo must be < hi");
    const double u = rng.uniform();
    if (lo >= 0.0) {
        // upper tail: work with survival probabilities
        const double qlo = norm_sf(lo);
        const double qhi = std::isinf(hi) ? 0.0 : norm_sf(hi);
        if (qlo <= qhi) return lo;  // interval mass below double resolution
        return -inv_norm_cdf(qhi + u * (qlo - qhi));
    }
    if (hi <= 0.0) {
        const double phi_ = norm_cdf(hi);
        const double plo = std::isinf(lo) ? 0.0 : norm_cdf(lo);
        if (phi_ <= plo) return hi;
        return inv_norm_cdf(plo + u * (phi_ - plo));
    }
    const double plo = std::isinf(lo) ? 0.0 : norm_cdf(lo);
    const double phi_ = std::isinf(hi) ? 1.0 : norm_cdf(hi);
    return inv_norm_cdf(plo + u * (phi_ - plo));
}

}  // namespace trunctest
