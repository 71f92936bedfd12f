#include "pat/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "pat/diagnostics.hpp"
#include "pat/kernels.hpp"

namespace pat {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

template <class M>
TensorData to_tensor_data(const M& m) {
    return TensorData{{m.rows(), m.cols()}, m.storage()};
}

std::pair<std::size_t, std::size_t> matrix_shape(const TensorData& t, const std::string& source) {
    if (t.dims.size() != 2) {
        throw Error(ErrorKind::ShapeMismatch,
                    source + ": expected a 2-D tensor, got ndim=" + std::to_string(t.dims.size()));
    }
    return {static_cast<std::size_t>(t.dims[0]), static_cast<std::size_t>(t.dims[1])};
}

template <class M>
M normalize_rows_impl(const M& m, std::vector<std::size_t>* zero_rows) {
    M out(m.rows(), m.cols());
    std::vector<double> scratch(m.cols());
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto src = m.row(i);
        for (std::size_t k = 0; k < src.size(); ++k) scratch[k] = src[k];
        if (!normalize_into(scratch, out.row(i))) {
            ++zeros;
            if (zero_rows) zero_rows->push_back(i);
        }
    }
    if (zeros > 0) {
        warn("l2_normalize_rows: " + std::to_string(zeros) + " all-zero row(s) left unnormalized");
    }
    return out;
}

} // namespace

void require_finite(std::span<const float> values, std::string_view what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw Error(ErrorKind::NonFiniteValue,
                        std::string(what) + ": non-finite value at flat index " + std::to_string(i));
        }
    }
}

std::vector<std::uint8_t> encode_tensor(const TensorData& t) {
    if (t.dims.size() > std::numeric_limits<std::uint8_t>::max()) {
        throw Error(ErrorKind::ShapeMismatch, "too many dimensions");
    }
    std::uint64_t count = 1;
    for (auto d : t.dims) count *= d;
    if (count != t.values.size()) {
        throw Error(ErrorKind::ShapeMismatch, "dims do not match value count");
    }
    require_finite(t.values, "tensor payload");

    std::vector<std::uint8_t> out;
    out.reserve(tensor_header_size(t.dims.size()) + 4 * t.values.size());
    out.insert(out.end(), tensor_magic.begin(), tensor_magic.end());
    put_u32(out, tensor_version);
    out.push_back(dtype_float32);
    out.push_back(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) put_u64(out, d);
    for (float v : t.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

TensorData decode_tensor(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < tensor_header_size(0)) {
        throw Error(ErrorKind::TruncatedHeader, "file shorter than the fixed header");
    }
    if (!std::equal(tensor_magic.begin(), tensor_magic.end(), bytes.begin())) {
        throw Error(ErrorKind::BadMagic, "expected magic \"PATE\"");
    }
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != tensor_version) {
        throw Error(ErrorKind::UnsupportedVersion, "version " + std::to_string(version));
    }
    const std::uint8_t dtype = bytes[8];
    if (dtype != dtype_float32) {
        throw Error(ErrorKind::UnsupportedDtype, "dtype code " + std::to_string(dtype));
    }
    const std::size_t ndim = bytes[9];
    const std::size_t header = tensor_header_size(ndim);
    if (bytes.size() < header) {
        throw Error(ErrorKind::TruncatedHeader, "dims truncated");
    }

    TensorData t;
    t.dims.resize(ndim);
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < ndim; ++i) {
        t.dims[i] = get_u64(bytes.data() + 10 + 8 * i);
        if (t.dims[i] != 0 && count > std::numeric_limits<std::uint64_t>::max() / 4 / t.dims[i]) {
            throw Error(ErrorKind::TruncatedPayload, "declared shape overflows");
        }
        count *= t.dims[i];
    }
    const std::uint64_t payload = bytes.size() - header;
    if (payload < 4 * count) {
        throw Error(ErrorKind::TruncatedPayload, "expected " + std::to_string(4 * count) +
                                                     " payload bytes, found " + std::to_string(payload));
    }
    if (payload > 4 * count) {
        throw Error(ErrorKind::TrailingBytes,
                    std::to_string(payload - 4 * count) + " bytes after payload");
    }
    t.values.resize(count);
    const std::uint8_t* p = bytes.data() + header;
    for (std::size_t i = 0; i < count; ++i) t.values[i] = std::bit_cast<float>(get_u32(p + 4 * i));
    require_finite(t.values, "tensor payload");
    return t;
}

void write_tensor(const TensorData& t, const std::filesystem::path& path) {
    const auto bytes = encode_tensor(t);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

void write_tensor(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    write_tensor(to_tensor_data(m), path);
}

void write_tensor(const FrameEmbeddings& m, const std::filesystem::path& path) {
    write_tensor(to_tensor_data(m), path);
}

TensorData read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_tensor(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

EmbeddingMatrix read_embedding_matrix(const std::filesystem::path& path) {
    auto t = read_tensor(path);
    auto [rows, cols] = matrix_shape(t, path.string());
    return EmbeddingMatrix(rows, cols, std::move(t.values));
}

FrameEmbeddings read_frame_embeddings(const std::filesystem::path& path) {
    auto t = read_tensor(path);
    auto [rows, cols] = matrix_shape(t, path.string());
    if (rows == 0) throw Error(ErrorKind::ShapeMismatch, path.string() + ": zero frames");
    return FrameEmbeddings(rows, cols, std::move(t.values));
}

EmbeddingMatrix l2_normalize_rows(const EmbeddingMatrix& m, std::vector<std::size_t>* zero_rows) {
    return normalize_rows_impl(m, zero_rows);
}

FrameEmbeddings l2_normalize_rows(const FrameEmbeddings& m, std::vector<std::size_t>* zero_rows) {
    return normalize_rows_impl(m, zero_rows);
}

} // namespace pat
