#pragma once

#include "tracenorm/matrix.hpp"

namespace tracenorm {

/// Dense accumulator of sum_t X_t (x) X_t for m x n samples, stored as an
/// (m*m) x (n*n) matrix viewed as an m x n grid of m x n blocks:
/// block (i,j) = sum_t X_t[i,j] * X_t.
///
/// Mutation is not synchronized; a writer needs exclusive access.
class KronStats {
public:
    KronStats() = default;
    KronStats(std::size_t block_rows, std::size_t block_cols);

    std::size_t block_rows() const { return block_rows_; }
    std::size_t block_cols() const { return block_cols_; }
    const Matrix& values() const { return values_; }

    /// Entry (p, q) of block (i, j).
    double block_entry(std::size_t i, std::size_t j, std::size_t p, std::size_t q) const {
        return values_(i * block_rows_ + p, j * block_cols_ + q);
    }

    /// Accumulate one sample: block (i,j) += x[i,j] * x.
    void accumulate(const Matrix& x);

    KronStats& operator+=(const KronStats& rhs);

private:
    std::size_t block_rows_ = 0;
    std::size_t block_cols_ = 0;
    Matrix values_;
};

/// Value-returning form of KronStats::accumulate.
KronStats kron_accumulate(KronStats b, const Matrix& x);

/// result(i,j) = Tr(z^T block(i,j)). For b accumulated from samples X_t this
/// equals sum_t Tr(z^T X_t) X_t, the data term of the squared-loss gradient.
Matrix grid_tr(const Matrix& z, const KronStats& b);

} // namespace tracenorm
