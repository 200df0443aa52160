#pragma once

#include <iosfwd>
#include <string>

#include "trunc/batch.hpp"

namespace trunctest {

/// CSV with a `# seed=..., stream=..., n=..., T=...` comment header, one row
/// per sample, 17 significant digits (round-trips doubles).
void write_batch_csv(const SampleBatch& batch, std::ostream& out);
SampleBatch read_batch_csv(std::istream& in);

/// Little-endian binary: an 8-field u64 header (magic, version, n, T, seed,
/// stream, two reserved words) followed by row-major 64-bit floats.
void write_batch_binary(const SampleBatch& batch, std::ostream& out);
SampleBatch read_batch_binary(std::istream& in);

void save_batch(const SampleBatch& batch, const std::string& path, bool binary);
SampleBatch load_batch(const std::string& path);

}  // namespace trunctest
