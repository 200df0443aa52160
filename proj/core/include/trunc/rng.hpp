#pragma once

#include <cmath>
#include <cstdint>

namespace trunctest {

/// Counter-based random stream. A stream is a pure function of
/// (master_seed, stream_index, counter), so two streams constructed with the
/// same pair replay the same sequence regardless of scheduling, and every
/// Monte Carlo trial can own its own substream.
class RngStream {
public:
    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
        : master_seed_(master_seed),
          stream_index_(stream_index),
          key_(mix64(master_seed ^ mix64(stream_index + kGolden))) {}

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    std::uint64_t next_u64() {
        // SplitMix64: the key acts as the starting state, the counter walks it
        std::uint64_t z = key_ + (++counter_) * kGolden;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in the open interval (0,1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal draw (Marsaglia polar method, spare cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Child stream with an index derived from (stream_index, child).
    /// Derivation is stateless: it does not consume from this stream.
    RngStream substream(std::uint64_t child) const {
        return RngStream(master_seed_, mix64(stream_index_ ^ mix64(child + kGolden)));
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 33;
        z *= 0xFF51AFD7ED558CCDULL;
        z ^= z >> 33;
        z *= 0xC4CEB9FE1A85EC53ULL;
        z ^= z >> 33;
        return z;
    }

    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace trunctest
