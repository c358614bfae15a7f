#pragma once

#include <cstdint>
#include <vector>

#include "tracenorm/matrix.hpp"

namespace tracenorm {

/// Scalar shrinkage: x-eps if x > eps, x+eps if x < -eps, 0 otherwise.
double soft_threshold(double x, double eps);
/// Element-wise extension of the scalar operator.
Matrix soft_threshold(const Matrix& m, double eps);

/// Thin SVD m = u * diag(s) * v^T with s non-increasing and u, v
/// column-orthonormal. Columns are sign-fixed (first nonzero entry of each
/// u column is non-negative) so the factorization is reproducible.
struct SvdFactors {
    Matrix u;               // m x r
    std::vector<double> s;  // length r = min(m, n), non-increasing, >= 0
    Matrix v;               // n x r

    Matrix reconstruct() const;  // u * diag(s) * v^T
};

/// One-sided Jacobi SVD. Deterministic; throws NumericalError if the column
/// orthogonalization has not converged after the sweep cap (never observed
/// at the matrix sizes this library targets).
SvdFactors svd(const Matrix& m);

/// Process-wide count of svd() invocations, for cost accounting in tests.
std::uint64_t svd_call_count();
void reset_svd_call_count();

/// Sum of singular values.
double trace_norm(const Matrix& m);
/// Largest singular value.
double spectral_norm(const Matrix& m);

/// Shrink the singular values of m by eps and reconstruct. The rank of the
/// result equals the number of singular values strictly above eps.
Matrix singular_value_threshold(const Matrix& m, double eps);

struct MatrixNorms {
    double frobenius;
    double spectral;
    double l1;
    double max_abs;
};

MatrixNorms matrix_norms(const Matrix& m);

} // namespace tracenorm
