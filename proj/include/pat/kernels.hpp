#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pat/matrix.hpp"

namespace pat {

/// Dot product of two float vectors with float64 accumulation.
///
/// Every logit, attention weight and score in the library goes through this
/// function, so results computed along different call paths are bit-equal.
/// Summation order is fixed (four interleaved partial sums, then a tail), so
/// the result does not depend on how callers block or parallelize.
double dot(std::span<const float> a, std::span<const float> b) noexcept;

/// Row-wise products: out(i, j) = dot(lhs.row(i), rhs.row(j)).
/// Shapes are the caller's responsibility; `out` must be lhs.rows() x rhs.rows().
void gemm_nt(std::span<const float> lhs, std::size_t lhs_rows, std::span<const float> rhs,
             std::size_t rhs_rows, std::size_t dim, std::span<double> out) noexcept;

/// Numerically stable softmax (max-shifted) of `logits` into `out`.
void softmax(std::span<const double> logits, std::span<double> out) noexcept;

/// Row-wise softmax over the column axis.
DenseMatrix row_softmax(const DenseMatrix& m);

/// Tolerance on |norm - 1| accepted by operations that require unit rows.
inline constexpr double unit_norm_tolerance = 1e-3;

/// True when every row has unit norm within `unit_norm_tolerance` or is all-zero.
bool rows_are_unit_or_zero(std::span<const float> data, std::size_t rows, std::size_t dim) noexcept;

/// Scales a double row to unit norm in place and stores it as float. Returns false
/// (and writes zeros) when the row norm is zero.
bool normalize_into(std::span<const double> src, std::span<float> dst) noexcept;

} // namespace pat
