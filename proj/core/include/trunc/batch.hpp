#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace trunctest {

/// A block of T samples in R^n (one row per sample) tagged with the stream
/// that produced it.
struct SampleBatch {
    Eigen::MatrixXd data;  // T x n
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    Eigen::Index dim() const { return data.cols(); }
    Eigen::Index count() const { return data.rows(); }
};

}  // namespace trunctest
