#pragma once

#include <cstddef>
#include <vector>

namespace tracenorm {

/// Dense real matrix in row-major order. This is the one sample/parameter
/// container shared by every solver in the library; all entries are expected
/// to be finite (solvers reject NaN/Inf at their entry points).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool is_finite() const;
    bool is_zero() const;

    Matrix transposed() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    /// *this += s * rhs
    Matrix& add_scaled(double s, const Matrix& rhs);

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(Matrix m, double s);
Matrix operator*(double s, Matrix m);

/// Ordinary matrix product (a.cols() must equal b.rows()).
Matrix operator*(const Matrix& a, const Matrix& b);

/// Tr(a^T b), i.e. the sum of the element-wise product.
double trace_product(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);
/// Sum of the absolute values of all entries.
double l1_norm(const Matrix& m);
/// Largest absolute entry.
double max_abs(const Matrix& m);

void require_same_shape(const Matrix& a, const Matrix& b, const char* where);
void require_finite(const Matrix& m, const char* where);
void require_nonempty(const Matrix& m, const char* where);

} // namespace tracenorm
