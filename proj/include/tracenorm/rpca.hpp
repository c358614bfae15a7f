#pragma once

#include <vector>

#include "tracenorm/matrix.hpp"

namespace tracenorm {

/// Parameters of the inexact augmented-Lagrange-multiplier decomposition.
/// lambda and mu0 accept 0 as "derive from the input": lambda becomes
/// 1/sqrt(max(m, n)) and mu0 becomes 1.25 / ||D||_2, which keeps the solver
/// scale-free.
struct RpcaConfig {
    double lambda = 0.0;
    double mu0 = 0.0;
    double rho = 1.5;
    double tol = 1e-7;
    int max_iter = 500;
};

double default_rpca_lambda(std::size_t rows, std::size_t cols);

/// Result of splitting D into a low-rank component plus a sparse error
/// component. residual is ||D - A - E||_F / ||D||_F at the returned iterate;
/// when converged is false the best iterate seen is returned instead of the
/// last one.
struct RpcaDecomposition {
    Matrix a;
    Matrix e;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;
};

/// max(||d||_2, max_abs(d)/lambda), the scaling that seeds the dual variable.
double dual_scaling(const Matrix& d, double lambda);

/// Split d = a + e by alternating singular-value shrinkage on a, element-wise
/// shrinkage on e, and a dual ascent step, with the penalty grown by rho each
/// iteration until the relative feasibility gap drops below cfg.tol.
RpcaDecomposition rpca_ialm(const Matrix& d, const RpcaConfig& cfg = {});

} // namespace tracenorm
