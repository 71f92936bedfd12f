#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "pat/error.hpp"

namespace pat {

struct EmbeddingTag;
struct FrameTag;
struct LogitTag;
struct AttentionTag;
struct DenseTag;

/// Dense row-major 2-D array. The tag keeps domain types apart (a logit
/// matrix cannot be passed where an attention map is expected).
template <class T, class Tag>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols) : Matrix(rows, cols, std::vector<T>(rows * cols, T{})) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw Error(ErrorKind::ShapeMismatch, "data length " + std::to_string(data_.size()) +
                                                      " != " + std::to_string(rows_) + " x " +
                                                      std::to_string(cols_));
        }
        if constexpr (std::is_same_v<Tag, FrameTag>) {
            if (rows_ == 0) {
                throw Error(ErrorKind::ShapeMismatch, "frame embeddings need at least one frame");
            }
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Row embeddings: a text bank (M x d) or pooled audio (N_s x d).
using EmbeddingMatrix = Matrix<float, EmbeddingTag>;
/// Frame-level audio for one sample (c x d, c >= 1).
using FrameEmbeddings = Matrix<float, FrameTag>;
/// Samples x classes cosine scores.
using LogitMatrix = Matrix<double, LogitTag>;
/// Frames x classes frame/label correlations.
using AttentionMap = Matrix<double, AttentionTag>;
/// Scratch double-precision matrix for intermediate results.
using DenseMatrix = Matrix<double, DenseTag>;

template <class To, class T, class Tag>
To matrix_cast(const Matrix<T, Tag>& m) {
    using V = typename To::value_type;
    std::vector<V> out(m.size());
    auto src = m.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<V>(src[i]);
    return To(m.rows(), m.cols(), std::move(out));
}

} // namespace pat
