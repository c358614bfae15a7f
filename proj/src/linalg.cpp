#include "tracenorm/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include "tracenorm/errors.hpp"

namespace tracenorm {

namespace {

std::atomic<std::uint64_t> g_svd_calls{0};

constexpr int kMaxSweeps = 60;
constexpr double kOffTol = 1e-12;  // relative off-diagonal tolerance per column pair

struct ColumnBasis {
    Matrix g;  // rotated copy of the input, columns mutually orthogonal
    Matrix v;  // accumulated right rotations
};

// Hestenes one-sided Jacobi: repeatedly rotate column pairs of g until all
// pairs satisfy |g_p . g_q| <= kOffTol * ||g_p|| ||g_q||. Requires rows >= cols.
// Columns whose norm falls below 1e-14 of the matrix scale are flushed to
// zero; annihilating near-proportional columns leaves rounding dust that
// stays parallel to the survivors and would otherwise never pass the
// relative test.
ColumnBasis orthogonalize_columns(Matrix g) {
    const std::size_t m = g.rows();
    const std::size_t n = g.cols();
    Matrix v = Matrix::identity(n);

    const double scale = frobenius_norm(g);
    const double deflate2 = (1e-14 * scale) * (1e-14 * scale);
    auto flush_column = [&](std::size_t j) {
        for (std::size_t k = 0; k < m; ++k) g(k, j) = 0.0;
    };

    double off = 0.0;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    const double gp = g(k, p);
                    const double gq = g(k, q);
                    app += gp * gp;
                    aqq += gq * gq;
                    apq += gp * gq;
                }
                if (app <= deflate2) {
                    flush_column(p);
                    continue;
                }
                if (aqq <= deflate2) {
                    flush_column(q);
                    continue;
                }
                if (apq == 0.0) continue;
                const double rel = std::abs(apq) / (std::sqrt(app) * std::sqrt(aqq));
                off = std::max(off, rel);
                if (rel <= kOffTol) continue;

                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < m; ++k) {
                    const double gp = g(k, p);
                    const double gq = g(k, q);
                    g(k, p) = c * gp - s * gq;
                    g(k, q) = s * gp + c * gq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vp = v(k, p);
                    const double vq = v(k, q);
                    v(k, p) = c * vp - s * vq;
                    v(k, q) = s * vp + c * vq;
                }
            }
        }
        if (off <= kOffTol) return {std::move(g), std::move(v)};
    }
    throw NumericalError("svd: Jacobi sweeps did not converge after " +
                         std::to_string(kMaxSweeps) + " sweeps (residual " +
                         std::to_string(off) + ")");
}

// Replace the zero columns of u (flagged in zero_col) with unit vectors
// orthonormal to every other column, chosen deterministically from the
// canonical basis.
void complete_basis(Matrix& u, const std::vector<bool>& zero_col) {
    const std::size_t m = u.rows();
    const std::size_t r = u.cols();
    std::size_t next_axis = 0;
    for (std::size_t j = 0; j < r; ++j) {
        if (!zero_col[j]) continue;
        for (; next_axis < m; ++next_axis) {
            std::vector<double> w(m, 0.0);
            w[next_axis] = 1.0;
            // two Gram-Schmidt passes against the non-zero and already filled columns
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t k = 0; k < r; ++k) {
                    if (k == j || (zero_col[k] && k > j)) continue;
                    double dot = 0.0;
                    for (std::size_t i = 0; i < m; ++i) dot += w[i] * u(i, k);
                    for (std::size_t i = 0; i < m; ++i) w[i] -= dot * u(i, k);
                }
            }
            double norm = 0.0;
            for (double x : w) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 0.5) {
                for (std::size_t i = 0; i < m; ++i) u(i, j) = w[i] / norm;
                ++next_axis;
                break;
            }
        }
    }
}

// Factorize a matrix with rows >= cols.
SvdFactors svd_tall(const Matrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t r = m.cols();
    ColumnBasis basis = orthogonalize_columns(m);

    std::vector<double> norms(r);
    for (std::size_t j = 0; j < r; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += basis.g(i, j) * basis.g(i, j);
        norms[j] = std::sqrt(s);
    }

    std::vector<std::size_t> order(r);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    SvdFactors f;
    f.u = Matrix(rows, r);
    f.s.resize(r);
    f.v = Matrix(m.cols(), r);
    std::vector<bool> zero_col(r, false);
    for (std::size_t j = 0; j < r; ++j) {
        const std::size_t src = order[j];
        f.s[j] = norms[src];
        if (norms[src] == 0.0) {
            zero_col[j] = true;
        } else {
            for (std::size_t i = 0; i < rows; ++i) f.u(i, j) = basis.g(i, src) / norms[src];
        }
        for (std::size_t i = 0; i < m.cols(); ++i) f.v(i, j) = basis.v(i, src);
    }
    complete_basis(f.u, zero_col);
    return f;
}

void apply_sign_convention(SvdFactors& f) {
    for (std::size_t j = 0; j < f.u.cols(); ++j) {
        double lead = 0.0;
        for (std::size_t i = 0; i < f.u.rows(); ++i) {
            if (f.u(i, j) != 0.0) {
                lead = f.u(i, j);
                break;
            }
        }
        if (lead < 0.0) {
            for (std::size_t i = 0; i < f.u.rows(); ++i) f.u(i, j) = -f.u(i, j);
            for (std::size_t i = 0; i < f.v.rows(); ++i) f.v(i, j) = -f.v(i, j);
        }
    }
}

} // namespace

double soft_threshold(double x, double eps) {
    if (x > eps) return x - eps;
    if (x < -eps) return x + eps;
    return 0.0;
}

Matrix soft_threshold(const Matrix& m, double eps) {
    if (eps < 0.0) throw std::invalid_argument("soft_threshold: eps must be >= 0");
    Matrix out = m;
    for (double& v : out.values()) v = soft_threshold(v, eps);
    return out;
}

Matrix SvdFactors::reconstruct() const {
    const std::size_t m = u.rows();
    const std::size_t r = s.size();
    const std::size_t n = v.rows();
    Matrix out(m, n);
    for (std::size_t k = 0; k < r; ++k) {
        if (s[k] == 0.0) continue;
        for (std::size_t i = 0; i < m; ++i) {
            const double us = u(i, k) * s[k];
            for (std::size_t j = 0; j < n; ++j) out(i, j) += us * v(j, k);
        }
    }
    return out;
}

namespace {

SvdFactors svd_any(const Matrix& m) {
    if (m.rows() >= m.cols()) return svd_tall(m);
    // wide input: factorize the transpose and swap the bases
    SvdFactors t = svd_tall(m.transposed());
    SvdFactors f;
    f.u = std::move(t.v);
    f.s = std::move(t.s);
    f.v = std::move(t.u);
    return f;
}

} // namespace

SvdFactors svd(const Matrix& m) {
    require_nonempty(m, "svd");
    require_finite(m, "svd");
    g_svd_calls.fetch_add(1, std::memory_order_relaxed);

    // prescale extreme inputs by a power of two so squared column norms
    // neither underflow nor overflow; the singular values scale back exactly
    const double peak = max_abs(m);
    if (peak > 0.0 && (peak < 1e-100 || peak > 1e100)) {
        const double factor = std::ldexp(1.0, -std::ilogb(peak));
        Matrix scaled = m;
        scaled *= factor;
        SvdFactors f = svd_any(scaled);
        for (double& s : f.s) s /= factor;
        apply_sign_convention(f);
        return f;
    }
    SvdFactors f = svd_any(m);
    apply_sign_convention(f);
    return f;
}

std::uint64_t svd_call_count() { return g_svd_calls.load(std::memory_order_relaxed); }

void reset_svd_call_count() { g_svd_calls.store(0, std::memory_order_relaxed); }

double trace_norm(const Matrix& m) {
    SvdFactors f = svd(m);
    double s = 0.0;
    for (double x : f.s) s += x;
    return s;
}

double spectral_norm(const Matrix& m) { return svd(m).s.front(); }

Matrix singular_value_threshold(const Matrix& m, double eps) {
    if (eps < 0.0) throw std::invalid_argument("singular_value_threshold: eps must be >= 0");
    SvdFactors f = svd(m);
    for (double& s : f.s) s = std::max(s - eps, 0.0);
    return f.reconstruct();
}

MatrixNorms matrix_norms(const Matrix& m) {
    require_nonempty(m, "matrix_norms");
    require_finite(m, "matrix_norms");
    return {frobenius_norm(m), spectral_norm(m), l1_norm(m), max_abs(m)};
}

} // namespace tracenorm
