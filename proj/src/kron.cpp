#include "tracenorm/kron.hpp"

#include <string>

#include "tracenorm/errors.hpp"

namespace tracenorm {

namespace {
// Beyond this the dense (m*m) x (n*n) buffer stops being desk-scale.
constexpr std::size_t kMaxBlockElems = 4096;
} // namespace

KronStats::KronStats(std::size_t block_rows, std::size_t block_cols)
    : block_rows_(block_rows), block_cols_(block_cols) {
    if (block_rows == 0 || block_cols == 0)
        throw DimensionError("KronStats: block dimensions must be positive");
    if (block_rows * block_cols > kMaxBlockElems)
        throw DimensionError("KronStats: sample size " + std::to_string(block_rows) + "x" +
                             std::to_string(block_cols) + " exceeds the supported limit of " +
                             std::to_string(kMaxBlockElems) + " elements");
    values_ = Matrix(block_rows * block_rows, block_cols * block_cols);
}

void KronStats::accumulate(const Matrix& x) {
    if (x.rows() != block_rows_ || x.cols() != block_cols_)
        throw DimensionError("KronStats::accumulate: sample shape " + std::to_string(x.rows()) +
                             "x" + std::to_string(x.cols()) + " does not match blocks " +
                             std::to_string(block_rows_) + "x" + std::to_string(block_cols_));
    for (std::size_t i = 0; i < block_rows_; ++i) {
        for (std::size_t j = 0; j < block_cols_; ++j) {
            const double scale = x(i, j);
            if (scale == 0.0) continue;
            for (std::size_t p = 0; p < block_rows_; ++p) {
                const std::size_t row = i * block_rows_ + p;
                for (std::size_t q = 0; q < block_cols_; ++q)
                    values_(row, j * block_cols_ + q) += scale * x(p, q);
            }
        }
    }
}

KronStats& KronStats::operator+=(const KronStats& rhs) {
    if (block_rows_ != rhs.block_rows_ || block_cols_ != rhs.block_cols_)
        throw DimensionError("KronStats::operator+=: block shapes differ");
    values_ += rhs.values_;
    return *this;
}

KronStats kron_accumulate(KronStats b, const Matrix& x) {
    b.accumulate(x);
    return b;
}

Matrix grid_tr(const Matrix& z, const KronStats& b) {
    if (z.rows() != b.block_rows() || z.cols() != b.block_cols())
        throw DimensionError("grid_tr: input shape " + std::to_string(z.rows()) + "x" +
                             std::to_string(z.cols()) + " does not match blocks " +
                             std::to_string(b.block_rows()) + "x" + std::to_string(b.block_cols()));
    const std::size_t m = b.block_rows();
    const std::size_t n = b.block_cols();
    Matrix out(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < m; ++p)
                for (std::size_t q = 0; q < n; ++q) s += z(p, q) * b.block_entry(i, j, p, q);
            out(i, j) = s;
        }
    }
    return out;
}

} // namespace tracenorm
