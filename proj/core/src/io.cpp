#include "trunc/io.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "trunc/errors.hpp"

namespace trunctest {

namespace {

constexpr std::uint64_t kMagic = 0x7472756e63626174ull;  // "truncbat"
constexpr std::uint64_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw InvalidArgument("batch binary: truncated header");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

void write_batch_csv(const SampleBatch& batch, std::ostream& out) {
    out << "# seed=" << batch.master_seed << ", stream=" << batch.stream_index
        << ", n=" << batch.dim() << ", T=" << batch.count() << "\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < batch.count(); ++i) {
        for (Eigen::Index j = 0; j < batch.dim(); ++j) {
            if (j) out << ',';
            out << batch.data(i, j);
        }
        out << '\n';
    }
}

SampleBatch read_batch_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# seed=", 0) != 0)
        throw InvalidArgument("batch csv: missing header line");
    SampleBatch batch;
    Eigen::Index n = 0, t = 0;
    if (std::sscanf(line.c_str(), "# seed=%llu, stream=%llu, n=%lld, T=%lld",
                    reinterpret_cast<unsigned long long*>(&batch.master_seed),
                    reinterpret_cast<unsigned long long*>(&batch.stream_index),
                    reinterpret_cast<long long*>(&n),
                    reinterpret_cast<long long*>(&t)) != 4)
        throw InvalidArgument("batch csv: malformed header line");
    batch.data.resize(t, n);
    for (Eigen::Index i = 0; i < t; ++i) {
        if (!std::getline(in, line)) throw InvalidArgument("batch csv: too few rows");
        std::istringstream row(line);
        std::string cell;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!std::getline(row, cell, ','))
                throw InvalidArgument("batch csv: too few columns");
            batch.data(i, j) = std::stod(cell);
        }
    }
    return batch;
}

void write_batch_binary(const SampleBatch& batch, std::ostream& out) {
    put_u64(out, kMagic);
    put_u64(out, kVersion);
    put_u64(out, static_cast<std::uint64_t>(batch.dim()));
    put_u64(out, static_cast<std::uint64_t>(batch.count()));
    put_u64(out, batch.master_seed);
    put_u64(out, batch.stream_index);
    put_u64(out, 0);
    put_u64(out, 0);
    for (Eigen::Index i = 0; i < batch.count(); ++i)
        for (Eigen::Index j = 0; j < batch.dim(); ++j) {
            std::uint64_t bits;
            const double v = batch.data(i, j);
            std::memcpy(&bits, &v, 8);
            put_u64(out, bits);
        }
}

SampleBatch read_batch_binary(std::istream& in) {
    if (get_u64(in) != kMagic) throw InvalidArgument("batch binary: bad magic");
    if (get_u64(in) != kVersion) throw InvalidArgument("batch binary: unknown version");
    const auto n = static_cast<Eigen::Index>(get_u64(in));
    const auto t = static_cast<Eigen::Index>(get_u64(in));
    SampleBatch batch;
    batch.master_seed = get_u64(in);
    batch.stream_index = get_u64(in);
    get_u64(in);
    get_u64(in);
    batch.data.resize(t, n);
    for (Eigen::Index i = 0; i < t; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const std::uint64_t bits = get_u64(in);
            double v;
            std::memcpy(&v, &bits, 8);
            batch.data(i, j) = v;
        }
    return batch;
}

void save_batch(const SampleBatch& batch, const std::string& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw InvalidArgument("save_batch: cannot open " + path);
    if (binary)
        write_batch_binary(batch, out);
    else
        write_batch_csv(batch, out);
}

SampleBatch load_batch(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("load_batch: cannot open " + path);
    const int first = in.peek();
    if (first == '#') return read_batch_csv(in);
    return read_batch_binary(in);
}

}  // namespace trunctest
