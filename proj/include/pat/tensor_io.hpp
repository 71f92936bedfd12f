#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pat/matrix.hpp"

namespace pat {

// On-disk tensor layout, little-endian throughout:
//
//   offset  size        field
//   0       4           magic "PATE"
//   4       4           version (u32) = 1
//   8       1           dtype code (u8), 0 = float32
//   9       1           ndim (u8)
//   10      8 * ndim    dims (u64 each)
//   ...     4 * prod    payload, row-major float32
inline constexpr std::array<char, 4> tensor_magic = {'P', 'A', 'T', 'E'};
inline constexpr std::uint32_t tensor_version = 1;
inline constexpr std::uint8_t dtype_float32 = 0;

inline constexpr std::size_t tensor_header_size(std::size_t ndim) { return 4 + 4 + 1 + 1 + 8 * ndim; }

/// A tensor as stored on disk, before it is given a domain type.
struct TensorData {
    std::vector<std::uint64_t> dims;
    std::vector<float> values;
};

std::vector<std::uint8_t> encode_tensor(const TensorData& t);
TensorData decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const EmbeddingMatrix& m, const std::filesystem::path& path);
void write_tensor(const FrameEmbeddings& m, const std::filesystem::path& path);
void write_tensor(const TensorData& t, const std::filesystem::path& path);

TensorData read_tensor(const std::filesystem::path& path);
EmbeddingMatrix read_embedding_matrix(const std::filesystem::path& path);
FrameEmbeddings read_frame_embeddings(const std::filesystem::path& path);

/// Throws NonFiniteValue naming `what` if any entry is NaN or infinite.
void require_finite(std::span<const float> values, std::string_view what);

/// Scales every row to unit Euclidean norm. All-zero rows are kept as-is and
/// reported on the warning channel; their indices are appended to
/// `zero_rows` when given.
EmbeddingMatrix l2_normalize_rows(const EmbeddingMatrix& m, std::vector<std::size_t>* zero_rows = nullptr);
FrameEmbeddings l2_normalize_rows(const FrameEmbeddings& m, std::vector<std::size_t>* zero_rows = nullptr);

} // namespace pat
