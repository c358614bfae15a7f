#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "tracenorm/classifier.hpp"
#include "tracenorm/kron.hpp"
#include "tracenorm/matrix.hpp"

namespace tracenorm {

/// Running sums that let the full-data gradient and objective be rebuilt
/// without storing the samples: A = sum y_t X_t, B = sum X_t (x) X_t,
/// c = sum y_t, D = sum X_t, L = 2mn sum ||X_t||_F^2, t = sample count.
struct OnlineSufficientStats {
    Matrix a;
    KronStats b;
    double c = 0.0;
    Matrix d;
    double l = 0.0;
    std::size_t t = 0;

    OnlineSufficientStats() = default;
    OnlineSufficientStats(std::size_t rows, std::size_t cols)
        : a(rows, cols), b(rows, cols), d(rows, cols) {}

    std::size_t rows() const { return a.rows(); }
    std::size_t cols() const { return a.cols(); }
};

/// Fold a batch of samples into the statistics (batch size 1 recovers the
/// single-sample update).
void stats_update(OnlineSufficientStats& stats, std::span<const LabeledSample> batch);

/// -2A + 2 GridTr(z, B) + 2b D; equals the direct squared-loss gradient over
/// every sample folded into the stats.
Matrix surrogate_gradient(const OnlineSufficientStats& stats, const Matrix& z, double b);

/// Full objective over the accumulated set, rebuilt from the statistics
/// (uses sum y_t^2 = t, valid because labels are +-1).
double surrogate_objective(const OnlineSufficientStats& stats, const Matrix& w, double b,
                           double lambda);

enum class OnlineMode { exact, inexact };

struct OnlineConfig {
    double lambda = 1.0;
    double inner_eps1 = 1e-8;
    double inner_eps2 = 1e-8;
    int inner_max_iter = 200;
    OnlineMode mode = OnlineMode::exact;
    std::size_t batch_size = 1;
};

/// Passed to the observer after each processed sample (or mini-batch).
/// objective is the full objective over everything seen so far; computing it
/// costs one extra SVD per step, so it is only evaluated when an observer is
/// attached.
struct OnlineStepInfo {
    std::size_t t;
    double objective;
    int inner_steps;
    std::uint64_t total_inner_steps;
    const LinearMatrixModel& model;
};

using OnlineObserver = std::function<void(const OnlineStepInfo&)>;

struct OnlineFitResult {
    LinearMatrixModel model;
    OnlineSufficientStats stats;
    std::uint64_t total_inner_steps = 0;
    int solves = 0;         // number of inner solves (= processed batches)
    int capped_solves = 0;  // exact-mode solves stopped by inner_max_iter
    bool last_solve_converged = false;
    double rel_change_w = 0.0;  // from the last exact-mode solve
    double rel_change_b = 0.0;
};

/// Stream trainer. Per arriving sample (or mini-batch of cfg.batch_size):
/// fold it into the statistics, then update the model from the warm start
/// (W_{t-1}, b_{t-1}): a full inner APG solve in exact mode, or exactly two
/// proximal steps with the bias held fixed followed by one bias refit in
/// inexact mode. The stream order is the caller's; shuffle beforehand if
/// sampling is wanted.
OnlineFitResult online_fit(std::span<const LabeledSample> stream, const OnlineConfig& cfg,
                           const OnlineObserver& observer = {});

} // namespace tracenorm
