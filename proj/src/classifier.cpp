#include "tracenorm/classifier.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "apg_core.hpp"
#include "tracenorm/errors.hpp"
#include "tracenorm/linalg.hpp"

namespace tracenorm {

void validate_samples(std::span<const LabeledSample> samples, const char* where) {
    if (samples.empty()) throw std::invalid_argument(std::string(where) + ": no samples");
    const Matrix& first = samples.front().x;
    require_nonempty(first, where);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const LabeledSample& s = samples[i];
        if (!s.x.same_shape(first))
            throw DimensionError(std::string(where) + ": sample " + std::to_string(i) +
                                 " has shape " + std::to_string(s.x.rows()) + "x" +
                                 std::to_string(s.x.cols()) + ", expected " +
                                 std::to_string(first.rows()) + "x" + std::to_string(first.cols()));
        require_finite(s.x, where);
        if (s.y != 1.0 && s.y != -1.0)
            throw std::invalid_argument(std::string(where) + ": sample " + std::to_string(i) +
                                        " has label " + std::to_string(s.y) +
                                        ", expected -1 or +1");
    }
}

double objective(std::span<const LabeledSample> samples, const LinearMatrixModel& model) {
    validate_samples(samples, "objective");
    if (!model.w.same_shape(samples.front().x))
        throw DimensionError("objective: weight shape does not match the samples");
    double loss = 0.0;
    for (const LabeledSample& s : samples) {
        const double r = s.y - trace_product(model.w, s.x) - model.b;
        loss += r * r;
    }
    return loss + model.lambda * trace_norm(model.w);
}

Matrix gradient(std::span<const LabeledSample> samples, const Matrix& w, double b) {
    validate_samples(samples, "gradient");
    if (!w.same_shape(samples.front().x))
        throw DimensionError("gradient: weight shape does not match the samples");
    Matrix g(w.rows(), w.cols());
    for (const LabeledSample& s : samples)
        g.add_scaled(-2.0 * (s.y - trace_product(w, s.x) - b), s.x);
    return g;
}

double lipschitz_constant(std::span<const LabeledSample> samples, bool tight) {
    validate_samples(samples, "lipschitz_constant");
    double sum = 0.0;
    for (const LabeledSample& s : samples) {
        const double f = frobenius_norm(s.x);
        sum += f * f;
    }
    const double mn = tight ? 1.0
                            : double(samples.front().x.rows()) * double(samples.front().x.cols());
    return 2.0 * mn * sum;
}

double bias_update(std::span<const LabeledSample> samples, const Matrix& w) {
    validate_samples(samples, "bias_update");
    if (!w.same_shape(samples.front().x))
        throw DimensionError("bias_update: weight shape does not match the samples");
    double sum = 0.0;
    for (const LabeledSample& s : samples) sum += s.y - trace_product(w, s.x);
    return sum / double(samples.size());
}

FitResult apg_fit(std::span<const LabeledSample> samples, const ApgConfig& cfg,
                  const LinearMatrixModel* warm, const ApgObserver& observer) {
    validate_samples(samples, "apg_fit");
    if (cfg.lambda <= 0.0) throw std::invalid_argument("apg_fit: lambda must be positive");
    if (cfg.eps1 <= 0.0 || cfg.eps2 <= 0.0)
        throw std::invalid_argument("apg_fit: tolerances must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("apg_fit: max_iter must be positive");

    const Matrix& shape = samples.front().x;
    Matrix w0(shape.rows(), shape.cols());
    double b0 = 0.0;
    if (warm) {
        if (!warm->w.same_shape(shape))
            throw DimensionError("apg_fit: warm-start shape does not match the samples");
        w0 = warm->w;
        b0 = warm->b;
    }

    const double lipschitz = lipschitz_constant(samples, cfg.tight_lipschitz);
    if (lipschitz <= 0.0)
        throw std::invalid_argument("apg_fit: zero Lipschitz constant (all samples are zero)");

    detail::ApgProblem problem;
    problem.gradient = [samples](const Matrix& z, double b) { return gradient(samples, z, b); };
    problem.bias = [samples](const Matrix& w) { return bias_update(samples, w); };
    problem.lipschitz = lipschitz;
    problem.lambda = cfg.lambda;

    detail::ApgStop stop{cfg.eps1, cfg.eps2, cfg.max_iter};
    detail::ApgRun run =
        observer ? detail::run_apg(problem, std::move(w0), b0, stop,
                                   [&](int k, const Matrix& w, double b) {
                                       observer(k, LinearMatrixModel{w, b, cfg.lambda});
                                   })
                 : detail::run_apg(problem, std::move(w0), b0, stop);

    FitResult res;
    res.model = LinearMatrixModel{std::move(run.w), run.b, cfg.lambda};
    res.iterations = run.iterations;
    res.converged = run.converged;
    res.rel_change_w = run.rel_change_w;
    res.rel_change_b = run.rel_change_b;
    return res;
}

Prediction predict(const LinearMatrixModel& model, const Matrix& x) {
    require_same_shape(model.w, x, "predict");
    const double score = trace_product(model.w, x) + model.b;
    return {score, score >= 0.0 ? 1.0 : -1.0};
}

void write_model(std::ostream& os, const LinearMatrixModel& model) {
    os << "W " << model.w.rows() << ' ' << model.w.cols() << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < model.w.rows(); ++i) {
        for (std::size_t j = 0; j < model.w.cols(); ++j) {
            if (j) os << ' ';
            os << model.w(i, j);
        }
        os << '\n';
    }
    os << "b " << model.b << '\n';
    os << "lambda " << model.lambda << '\n';
}

void save_model(const std::string& path, const LinearMatrixModel& model) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    write_model(os, model);
    if (!os) throw FormatError("write to '" + path + "' failed");
}

LinearMatrixModel read_model(std::istream& is) {
    std::string tag;
    long long rows = 0, cols = 0;
    if (!(is >> tag >> rows >> cols) || tag != "W")
        throw FormatError("model header: expected 'W rows cols'");
    if (rows <= 0 || cols <= 0) throw FormatError("model header: dimensions must be positive");

    LinearMatrixModel model;
    model.w = Matrix(std::size_t(rows), std::size_t(cols));
    for (std::size_t i = 0; i < model.w.rows(); ++i)
        for (std::size_t j = 0; j < model.w.cols(); ++j)
            if (!(is >> model.w(i, j)))
                throw FormatError("model body: failed to read weight at row " + std::to_string(i));
    if (!(is >> tag >> model.b) || tag != "b") throw FormatError("model: expected 'b <value>'");
    if (!(is >> tag >> model.lambda) || tag != "lambda")
        throw FormatError("model: expected 'lambda <value>'");
    if (!model.w.is_finite() || !std::isfinite(model.b))
        throw FormatError("model: non-finite parameter values");
    if (!(model.lambda > 0.0)) throw FormatError("model: lambda must be positive");
    return model;
}

LinearMatrixModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open '" + path + "'");
    return read_model(is);
}

} // namespace tracenorm
