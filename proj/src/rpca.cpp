#include "tracenorm/rpca.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tracenorm/errors.hpp"
#include "tracenorm/linalg.hpp"

namespace tracenorm {

double default_rpca_lambda(std::size_t rows, std::size_t cols) {
    return 1.0 / std::sqrt(static_cast<double>(std::max(rows, cols)));
}

double dual_scaling(const Matrix& d, double lambda) {
    require_nonempty(d, "dual_scaling");
    require_finite(d, "dual_scaling");
    if (lambda <= 0.0) throw std::invalid_argument("dual_scaling: lambda must be positive");
    if (d.is_zero()) throw std::invalid_argument("dual_scaling: input matrix is zero");
    return std::max(spectral_norm(d), max_abs(d) / lambda);
}

RpcaDecomposition rpca_ialm(const Matrix& d, const RpcaConfig& cfg) {
    require_nonempty(d, "rpca_ialm");
    require_finite(d, "rpca_ialm");
    if (d.is_zero()) throw std::invalid_argument("rpca_ialm: input matrix is zero");
    if (cfg.lambda < 0.0) throw std::invalid_argument("rpca_ialm: lambda must be positive (or 0 for the default)");
    if (cfg.mu0 < 0.0) throw std::invalid_argument("rpca_ialm: mu0 must be positive (or 0 for the default)");
    if (cfg.rho <= 1.0) throw std::invalid_argument("rpca_ialm: rho must exceed 1");
    if (cfg.tol <= 0.0) throw std::invalid_argument("rpca_ialm: tol must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("rpca_ialm: max_iter must be positive");

    const double lambda = cfg.lambda > 0.0 ? cfg.lambda : default_rpca_lambda(d.rows(), d.cols());
    const double norm_d = frobenius_norm(d);
    double mu = cfg.mu0 > 0.0 ? cfg.mu0 : 1.25 / spectral_norm(d);

    Matrix y = d;
    y *= 1.0 / dual_scaling(d, lambda);
    Matrix e(d.rows(), d.cols());
    Matrix a(d.rows(), d.cols());

    RpcaDecomposition best;
    best.residual = std::numeric_limits<double>::infinity();
    RpcaDecomposition out;
    out.residual_history.reserve(static_cast<std::size_t>(cfg.max_iter));

    for (int k = 0; k < cfg.max_iter; ++k) {
        // a <- argmin over the low-rank block: shrink singular values by 1/mu
        Matrix ga = d - e;
        ga.add_scaled(1.0 / mu, y);
        a = singular_value_threshold(ga, 1.0 / mu);

        // e <- argmin over the sparse block: shrink entries by lambda/mu
        Matrix ge = d - a;
        ge.add_scaled(1.0 / mu, y);
        e = soft_threshold(ge, lambda / mu);

        Matrix gap = d - a;
        gap -= e;
        const double residual = frobenius_norm(gap) / norm_d;
        out.residual_history.push_back(residual);

        if (residual < best.residual) {
            best.a = a;
            best.e = e;
            best.residual = residual;
        }
        if (residual <= cfg.tol) {
            out.a = std::move(a);
            out.e = std::move(e);
            out.iterations = k + 1;
            out.residual = residual;
            out.converged = true;
            return out;
        }

        // dual ascent, then grow the penalty
        y.add_scaled(mu, gap);
        mu *= cfg.rho;
    }

    out.a = std::move(best.a);
    out.e = std::move(best.e);
    out.iterations = cfg.max_iter;
    out.residual = best.residual;
    out.converged = false;
    return out;
}

} // namespace tracenorm
