#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>

#include "tracenorm/matrix.hpp"

namespace tracenorm {

/// One training instance: an m x n feature matrix with a binary label
/// encoded as -1.0 or +1.0.
struct LabeledSample {
    Matrix x;
    double y = 0.0;
};

/// Linear classifier on matrix samples: score(X) = Tr(W^T X) + b. lambda is
/// the trace-norm weight the model was trained with.
struct LinearMatrixModel {
    Matrix w;
    double b = 0.0;
    double lambda = 1.0;
};

struct Prediction {
    double score;
    double label;  // +1 if score >= 0, else -1
};

/// Accelerated-proximal-gradient settings. The step size is fixed at 1/L with
/// L the explicit Lipschitz constant of the squared-loss gradient; there is
/// no line search. tight_lipschitz swaps the default constant
/// 2*m*n*sum||X_i||_F^2 for the smaller bound 2*sum||X_i||_F^2.
struct ApgConfig {
    double lambda = 1.0;
    double eps1 = 1e-8;
    double eps2 = 1e-8;
    int max_iter = 2000;
    bool tight_lipschitz = false;
};

struct FitResult {
    LinearMatrixModel model;
    int iterations = 0;
    bool converged = false;
    double rel_change_w = 0.0;  // ||W_k - W_{k-1}||_F / max(1, ||W_{k-1}||_F) at exit
    double rel_change_b = 0.0;  // |b_k - b_{k-1}| / max(1, |b_{k-1}|) at exit
};

/// sum_i (y_i - Tr(W^T X_i) - b)^2 + lambda * ||W||_*
double objective(std::span<const LabeledSample> samples, const LinearMatrixModel& model);

/// -2 sum_i (y_i - Tr(W^T X_i) - b) X_i
Matrix gradient(std::span<const LabeledSample> samples, const Matrix& w, double b);

/// 2*m*n*sum_i ||X_i||_F^2, or 2*sum_i ||X_i||_F^2 when tight.
double lipschitz_constant(std::span<const LabeledSample> samples, bool tight = false);

/// Mean residual (1/s) sum_i (y_i - Tr(W^T X_i)), the exact bias minimizer.
double bias_update(std::span<const LabeledSample> samples, const Matrix& w);

using ApgObserver = std::function<void(int iteration, const LinearMatrixModel& model)>;

/// Batch trainer: per iteration a singular-value-shrinkage step on the
/// momentum point, the Nesterov alpha/momentum update, and an exact bias
/// refit, stopping when both relative changes fall below eps1/eps2.
FitResult apg_fit(std::span<const LabeledSample> samples, const ApgConfig& cfg,
                  const LinearMatrixModel* warm = nullptr, const ApgObserver& observer = {});

Prediction predict(const LinearMatrixModel& model, const Matrix& x);

/// Text format: "W m n" followed by the row-major weight values, then
/// "b <value>" and "lambda <value>", all at full round-trip precision.
void write_model(std::ostream& os, const LinearMatrixModel& model);
void save_model(const std::string& path, const LinearMatrixModel& model);
LinearMatrixModel read_model(std::istream& is);
LinearMatrixModel load_model(const std::string& path);

/// Throws unless every sample is finite, labeled +-1, and shaped like the first.
void validate_samples(std::span<const LabeledSample> samples, const char* where);

} // namespace tracenorm
