#pragma once

// Internal APG driver shared by the batch trainer and the online inner
// solves. Not installed with the public headers.

#include <functional>

#include "tracenorm/linalg.hpp"
#include "tracenorm/matrix.hpp"

namespace tracenorm::detail {

struct ApgProblem {
    // gradient of the smooth part at the momentum point, using the bias from
    // the previous iteration
    std::function<Matrix(const Matrix& z, double b)> gradient;
    // exact bias refit given the new weights
    std::function<double(const Matrix& w)> bias;
    double lipschitz = 0.0;
    double lambda = 0.0;
};

struct ApgStop {
    double eps1 = 1e-8;
    double eps2 = 1e-8;
    int max_iter = 2000;
};

struct ApgRun {
    Matrix w;
    double b = 0.0;
    int iterations = 0;
    bool converged = false;
    double rel_change_w = 0.0;
    double rel_change_b = 0.0;
};

// W_k = shrink(Z_k - grad/L, lambda/L); alpha_{k+1} = (1+sqrt(1+4 alpha_k^2))/2;
// Z_{k+1} = W_k + ((alpha_k - 1)/alpha_{k+1}) (W_k - W_{k-1}); b_k = bias(W_k).
// Stops when both guarded relative changes drop below the tolerances.
template <typename OnIteration>
ApgRun run_apg(const ApgProblem& p, Matrix w0, double b0, const ApgStop& stop,
               OnIteration&& on_iteration) {
    ApgRun st;
    Matrix w = std::move(w0);
    Matrix z = w;
    double b = b0;
    double alpha = 1.0;
    const double inv_l = 1.0 / p.lipschitz;

    for (int k = 1; k <= stop.max_iter; ++k) {
        Matrix step = z;
        step.add_scaled(-inv_l, p.gradient(z, b));
        Matrix w_next = singular_value_threshold(step, p.lambda * inv_l);

        const double alpha_next = (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha)) / 2.0;
        z = w_next;
        z.add_scaled((alpha - 1.0) / alpha_next, w_next - w);

        const double b_next = p.bias(w_next);

        st.rel_change_w = frobenius_norm(w_next - w) / std::max(1.0, frobenius_norm(w));
        st.rel_change_b = std::abs(b_next - b) / std::max(1.0, std::abs(b));
        st.iterations = k;

        w = std::move(w_next);
        b = b_next;
        alpha = alpha_next;

        on_iteration(k, w, b);

        if (st.rel_change_w < stop.eps1 && st.rel_change_b < stop.eps2) {
            st.converged = true;
            break;
        }
    }
    st.w = std::move(w);
    st.b = b;
    return st;
}

inline ApgRun run_apg(const ApgProblem& p, Matrix w0, double b0, const ApgStop& stop) {
    return run_apg(p, std::move(w0), b0, stop, [](int, const Matrix&, double) {});
}

} // namespace tracenorm::detail
