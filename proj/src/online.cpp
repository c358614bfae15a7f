#include "tracenorm/online.hpp"

#include <cmath>
#include <string>

#include "apg_core.hpp"
#include "tracenorm/errors.hpp"
#include "tracenorm/linalg.hpp"

namespace tracenorm {

void stats_update(OnlineSufficientStats& stats, std::span<const LabeledSample> batch) {
    if (stats.a.empty()) throw std::invalid_argument("stats_update: uninitialized stats");
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const LabeledSample& s = batch[i];
        if (!s.x.same_shape(stats.a))
            throw DimensionError("stats_update: batch sample " + std::to_string(i) +
                                 " has shape " + std::to_string(s.x.rows()) + "x" +
                                 std::to_string(s.x.cols()) + ", stats expect " +
                                 std::to_string(stats.rows()) + "x" + std::to_string(stats.cols()));
        require_finite(s.x, "stats_update");
        if (s.y != 1.0 && s.y != -1.0)
            throw std::invalid_argument("stats_update: label must be -1 or +1");

        stats.a.add_scaled(s.y, s.x);
        stats.b.accumulate(s.x);
        stats.c += s.y;
        stats.d += s.x;
        const double f = frobenius_norm(s.x);
        stats.l += 2.0 * double(s.x.rows()) * double(s.x.cols()) * f * f;
        stats.t += 1;
    }
}

Matrix surrogate_gradient(const OnlineSufficientStats& stats, const Matrix& z, double b) {
    if (!z.same_shape(stats.a))
        throw DimensionError("surrogate_gradient: input shape does not match the stats");
    Matrix g = grid_tr(z, stats.b);
    g *= 2.0;
    g.add_scaled(-2.0, stats.a);
    g.add_scaled(2.0 * b, stats.d);
    return g;
}

double surrogate_objective(const OnlineSufficientStats& stats, const Matrix& w, double b,
                           double lambda) {
    if (!w.same_shape(stats.a))
        throw DimensionError("surrogate_objective: input shape does not match the stats");
    // expand sum (y - Tr(W^T X) - b)^2 using the stored sums; sum y^2 = t
    const double quad = trace_product(w, grid_tr(w, stats.b));
    const double loss = double(stats.t) + quad + double(stats.t) * b * b -
                        2.0 * trace_product(w, stats.a) - 2.0 * b * stats.c +
                        2.0 * b * trace_product(w, stats.d);
    return loss + lambda * trace_norm(w);
}

namespace {

double stats_bias(const OnlineSufficientStats& stats, const Matrix& w) {
    return (stats.c - trace_product(w, stats.d)) / double(stats.t);
}

} // namespace

OnlineFitResult online_fit(std::span<const LabeledSample> stream, const OnlineConfig& cfg,
                           const OnlineObserver& observer) {
    if (stream.empty()) throw std::invalid_argument("online_fit: empty stream");
    if (cfg.lambda <= 0.0) throw std::invalid_argument("online_fit: lambda must be positive");
    if (cfg.inner_eps1 <= 0.0 || cfg.inner_eps2 <= 0.0)
        throw std::invalid_argument("online_fit: tolerances must be positive");
    if (cfg.inner_max_iter < 1)
        throw std::invalid_argument("online_fit: inner_max_iter must be positive");
    if (cfg.batch_size < 1) throw std::invalid_argument("online_fit: batch_size must be positive");

    const std::size_t rows = stream.front().x.rows();
    const std::size_t cols = stream.front().x.cols();
    require_nonempty(stream.front().x, "online_fit");

    OnlineFitResult res;
    res.stats = OnlineSufficientStats(rows, cols);
    res.model.w = Matrix(rows, cols);
    res.model.b = 0.0;
    res.model.lambda = cfg.lambda;

    for (std::size_t start = 0; start < stream.size(); start += cfg.batch_size) {
        const std::size_t len = std::min(cfg.batch_size, stream.size() - start);
        std::span<const LabeledSample> batch = stream.subspan(start, len);
        for (std::size_t i = 0; i < len; ++i)
            if (!batch[i].x.same_shape(res.stats.a))
                throw DimensionError("online_fit: sample " + std::to_string(start + i) +
                                     " has shape " + std::to_string(batch[i].x.rows()) + "x" +
                                     std::to_string(batch[i].x.cols()) + ", expected " +
                                     std::to_string(rows) + "x" + std::to_string(cols));
        stats_update(res.stats, batch);

        int inner_steps = 0;
        if (res.stats.l <= 0.0) {
            // every sample so far is zero: the weights cannot move, but the
            // bias minimizer is still the running label mean
            res.model.b = stats_bias(res.stats, res.model.w);
            res.last_solve_converged = true;
            res.rel_change_w = 0.0;
            res.rel_change_b = 0.0;
        } else if (cfg.mode == OnlineMode::exact) {
            detail::ApgProblem problem;
            problem.gradient = [&stats = res.stats](const Matrix& z, double b) {
                return surrogate_gradient(stats, z, b);
            };
            problem.bias = [&stats = res.stats](const Matrix& w) { return stats_bias(stats, w); };
            problem.lipschitz = res.stats.l;
            problem.lambda = cfg.lambda;
            detail::ApgStop stop{cfg.inner_eps1, cfg.inner_eps2, cfg.inner_max_iter};
            detail::ApgRun run = detail::run_apg(problem, res.model.w, res.model.b, stop);
            res.model.w = std::move(run.w);
            res.model.b = run.b;
            res.last_solve_converged = run.converged;
            res.rel_change_w = run.rel_change_w;
            res.rel_change_b = run.rel_change_b;
            if (!run.converged) ++res.capped_solves;
            inner_steps = run.iterations;
        } else {
            // two proximal steps with the bias frozen at its previous value,
            // then one exact bias refit
            const double frozen_b = res.model.b;
            const double inv_l = 1.0 / res.stats.l;
            Matrix w = std::move(res.model.w);
            for (int step = 0; step < 2; ++step) {
                Matrix g = surrogate_gradient(res.stats, w, frozen_b);
                w.add_scaled(-inv_l, g);
                w = singular_value_threshold(w, cfg.lambda * inv_l);
            }
            res.model.w = std::move(w);
            res.model.b = stats_bias(res.stats, res.model.w);
            res.last_solve_converged = true;
            inner_steps = 2;
        }

        res.total_inner_steps += std::uint64_t(inner_steps);
        res.solves += 1;

        if (observer) {
            OnlineStepInfo info{res.stats.t,
                                surrogate_objective(res.stats, res.model.w, res.model.b, cfg.lambda),
                                inner_steps, res.total_inner_steps, res.model};
            observer(info);
        }
    }
    return res;
}

} // namespace tracenorm
