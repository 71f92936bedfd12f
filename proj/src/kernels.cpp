#include "pat/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace pat {

double dot(std::span<const float> a, std::span<const float> b) noexcept {
    const std::size_t n = std::min(a.size(), b.size());
    const float* pa = a.data();
    const float* pb = b.data();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += static_cast<double>(pa[i]) * pb[i];
        s1 += static_cast<double>(pa[i + 1]) * pb[i + 1];
        s2 += static_cast<double>(pa[i + 2]) * pb[i + 2];
        s3 += static_cast<double>(pa[i + 3]) * pb[i + 3];
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += static_cast<double>(pa[i]) * pb[i];
    return ((s0 + s1) + (s2 + s3)) + tail;
}

void gemm_nt(std::span<const float> lhs, std::size_t lhs_rows, std::span<const float> rhs,
             std::size_t rhs_rows, std::size_t dim, std::span<double> out) noexcept {
    // Four rhs rows per pass so each lhs row is streamed once per block; the
    // per-entry accumulation order matches dot() exactly.
    for (std::size_t i = 0; i < lhs_rows; ++i) {
        const float* a = lhs.data() + i * dim;
        double* o = out.data() + i * rhs_rows;
        std::size_t j = 0;
        for (; j + 4 <= rhs_rows; j += 4) {
            const float* b0 = rhs.data() + (j + 0) * dim;
            const float* b1 = rhs.data() + (j + 1) * dim;
            const float* b2 = rhs.data() + (j + 2) * dim;
            const float* b3 = rhs.data() + (j + 3) * dim;
            double acc[4][4] = {};
            std::size_t k = 0;
            for (; k + 4 <= dim; k += 4) {
                for (std::size_t u = 0; u < 4; ++u) {
                    const double x = a[k + u];
                    acc[0][u] += x * b0[k + u];
                    acc[1][u] += x * b1[k + u];
                    acc[2][u] += x * b2[k + u];
                    acc[3][u] += x * b3[k + u];
                }
            }
            double tail[4] = {};
            for (; k < dim; ++k) {
                const double x = a[k];
                tail[0] += x * b0[k];
                tail[1] += x * b1[k];
                tail[2] += x * b2[k];
                tail[3] += x * b3[k];
            }
            for (std::size_t r = 0; r < 4; ++r) {
                o[j + r] = ((acc[r][0] + acc[r][1]) + (acc[r][2] + acc[r][3])) + tail[r];
            }
        }
        for (; j < rhs_rows; ++j) {
            o[j] = dot({a, dim}, {rhs.data() + j * dim, dim});
        }
    }
}

void softmax(std::span<const double> logits, std::span<double> out) noexcept {
    if (logits.empty()) return;
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - peak);
        total += out[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= total;
}

DenseMatrix row_softmax(const DenseMatrix& m) {
    DenseMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) softmax(m.row(i), out.row(i));
    return out;
}

bool rows_are_unit_or_zero(std::span<const float> data, std::size_t rows, std::size_t dim) noexcept {
    for (std::size_t i = 0; i < rows; ++i) {
        std::span<const float> r = data.subspan(i * dim, dim);
        const double sq = dot(r, r);
        if (sq == 0.0) continue;
        if (std::abs(std::sqrt(sq) - 1.0) > unit_norm_tolerance) return false;
    }
    return true;
}

bool normalize_into(std::span<const double> src, std::span<float> dst) noexcept {
    double sq = 0.0;
    for (double v : src) sq += v * v;
    if (sq == 0.0) {
        std::fill(dst.begin(), dst.end(), 0.0f);
        return false;
    }
    const double norm = std::sqrt(sq);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<float>(src[i] / norm);
    return true;
}

} // namespace pat
