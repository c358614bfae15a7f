#include "tracenorm/matrix.hpp"

#include <cmath>
#include <string>

#include "tracenorm/errors.hpp"

namespace tracenorm {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_)
        throw DimensionError("Matrix: value count " + std::to_string(values_.size()) +
                             " does not match " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::is_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

bool Matrix::is_zero() const {
    for (double v : values_)
        if (v != 0.0) return false;
    return true;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    require_same_shape(*this, rhs, "Matrix::operator+=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += rhs.values_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    require_same_shape(*this, rhs, "Matrix::operator-=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= rhs.values_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

Matrix& Matrix::add_scaled(double s, const Matrix& rhs) {
    require_same_shape(*this, rhs, "Matrix::add_scaled");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * rhs.values_[k];
    return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(Matrix m, double s) { return m *= s; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw DimensionError("matrix product: inner dimensions " + std::to_string(a.cols()) +
                             " and " + std::to_string(b.rows()) + " differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

double trace_product(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "trace_product");
    double s = 0.0;
    const auto& av = a.values();
    const auto& bv = b.values();
    for (std::size_t k = 0; k < av.size(); ++k) s += av[k] * bv[k];
    return s;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return std::sqrt(s);
}

double l1_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += std::abs(v);
    return s;
}

double max_abs(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) s = std::max(s, std::abs(v));
    return s;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
    if (!a.same_shape(b))
        throw DimensionError(std::string(where) + ": shapes " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()) + " differ");
}

void require_finite(const Matrix& m, const char* where) {
    if (!m.is_finite())
        throw std::invalid_argument(std::string(where) + ": matrix has non-finite entries");
}

void require_nonempty(const Matrix& m, const char* where) {
    if (m.empty())
        throw std::invalid_argument(std::string(where) + ": empty matrix");
}

} // namespace tracenorm
