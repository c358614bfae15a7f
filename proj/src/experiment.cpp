#include "tracenorm/experiment.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "tracenorm/errors.hpp"

namespace tracenorm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

std::string_view trainer_name(TrainerKind kind) {
    switch (kind) {
        case TrainerKind::apg: return "apg";
        case TrainerKind::ol_apg: return "ol_apg";
        case TrainerKind::ol_iapg: return "ol_iapg";
        case TrainerKind::ol_apg_batch: return "ol_apg_batch";
        case TrainerKind::ol_iapg_batch: return "ol_iapg_batch";
    }
    return "?";
}

std::optional<TrainerKind> parse_trainer(std::string_view name) {
    for (TrainerKind kind : {TrainerKind::apg, TrainerKind::ol_apg, TrainerKind::ol_iapg,
                             TrainerKind::ol_apg_batch, TrainerKind::ol_iapg_batch})
        if (name == trainer_name(kind)) return kind;
    return std::nullopt;
}

TrainOutcome train_model(std::span<const LabeledSample> train,
                         std::span<const LabeledSample> test, const TrainConfig& cfg) {
    validate_samples(train, "train_model");
    const auto start = Clock::now();

    // full-training-set statistics make the per-row objective cheap to evaluate
    OnlineSufficientStats full_stats(train.front().x.rows(), train.front().x.cols());
    if (cfg.collect_trace) stats_update(full_stats, train);

    TrainOutcome out;
    auto trace_row = [&](std::size_t t, const LinearMatrixModel& model) {
        if (!cfg.collect_trace) return;
        TraceRow row;
        row.t = t;
        row.wall_seconds = seconds_since(start);
        row.objective = surrogate_objective(full_stats, model.w, model.b, cfg.lambda);
        row.test_accuracy =
            test.empty() ? std::nan("") : evaluate_accuracy(model, test);
        out.trace.push_back(row);
    };

    if (cfg.trainer == TrainerKind::apg) {
        ApgConfig apg_cfg;
        apg_cfg.lambda = cfg.lambda;
        apg_cfg.eps1 = cfg.eps1;
        apg_cfg.eps2 = cfg.eps2;
        apg_cfg.max_iter = cfg.max_iter;
        ApgObserver observer;
        if (cfg.collect_trace)
            observer = [&](int k, const LinearMatrixModel& model) {
                trace_row(std::size_t(k), model);
            };
        FitResult fit = apg_fit(train, apg_cfg, nullptr, observer);
        out.model = std::move(fit.model);
        out.converged = fit.converged;
        out.rel_change_w = fit.rel_change_w;
        out.rel_change_b = fit.rel_change_b;
    } else {
        OnlineConfig online_cfg;
        online_cfg.lambda = cfg.lambda;
        online_cfg.inner_eps1 = cfg.eps1;
        online_cfg.inner_eps2 = cfg.eps2;
        online_cfg.inner_max_iter = cfg.max_iter;
        online_cfg.mode = (cfg.trainer == TrainerKind::ol_iapg ||
                           cfg.trainer == TrainerKind::ol_iapg_batch)
                              ? OnlineMode::inexact
                              : OnlineMode::exact;
        online_cfg.batch_size = (cfg.trainer == TrainerKind::ol_apg_batch ||
                                 cfg.trainer == TrainerKind::ol_iapg_batch)
                                    ? cfg.batch_size
                                    : 1;

        std::vector<LabeledSample> stream;
        stream.reserve(train.size());
        for (std::size_t k : shuffled_indices(train.size(), cfg.seed))
            stream.push_back(train[k]);

        OnlineObserver observer;
        if (cfg.collect_trace)
            observer = [&](const OnlineStepInfo& info) { trace_row(info.t, info.model); };
        OnlineFitResult fit = online_fit(stream, online_cfg, observer);
        out.model = std::move(fit.model);
        out.converged = fit.last_solve_converged;
        out.rel_change_w = fit.rel_change_w;
        out.rel_change_b = fit.rel_change_b;
    }
    out.train_seconds = seconds_since(start);
    return out;
}

double evaluate_accuracy(const LinearMatrixModel& model, std::span<const LabeledSample> samples) {
    if (samples.empty()) throw std::invalid_argument("evaluate_accuracy: no samples");
    std::size_t correct = 0;
    for (const LabeledSample& s : samples)
        if (predict(model, s.x).label == s.y) ++correct;
    return double(correct) / double(samples.size());
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows) {
    os << "t,wall_seconds,objective,test_accuracy\n";
    os << std::setprecision(17);
    for (const TraceRow& row : rows) {
        os << row.t << ',' << row.wall_seconds << ',' << row.objective << ',';
        if (!std::isnan(row.test_accuracy)) os << row.test_accuracy;
        os << '\n';
    }
}

std::vector<std::pair<std::string, CorruptionSpec>> robustness_conditions() {
    using Kind = CorruptionSpec::Kind;
    return {
        {"normal", {Kind::none, 0.0, 0.0}},
        {"wgn_5db", {Kind::wgn, 5.0, 0.0}},
        {"wgn_0db", {Kind::wgn, 0.0, 0.0}},
        {"wgn_-5db", {Kind::wgn, -5.0, 0.0}},
        {"le_10", {Kind::large_errors, 0.0, 0.10}},
        {"le_30", {Kind::large_errors, 0.0, 0.30}},
        {"le_50", {Kind::large_errors, 0.0, 0.50}},
    };
}

std::vector<RobustnessCell> run_robustness(std::span<const DatasetItem> items,
                                           const RobustnessConfig& cfg) {
    bool has_train = false, has_test = false;
    for (const DatasetItem& item : items) (item.train ? has_train : has_test) = true;
    if (!has_train || !has_test)
        throw std::invalid_argument("run_robustness: need both train and test items");

    std::vector<RobustnessCell> cells;
    const auto conditions = robustness_conditions();
    for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
        for (const char* mode : {"plain", "rpca"}) {
            RobustnessCell cell;
            cell.condition = conditions[ci].first;
            cell.feature_mode = mode;
            try {
                PipelineConfig pipeline;
                pipeline.corruption = conditions[ci].second;
                pipeline.use_rpca = std::string_view(mode) == "rpca";
                pipeline.rpca_lambda = cfg.rpca_lambda;
                // the corruption draw depends on the condition and item only,
                // so both feature modes see identical corrupted inputs
                pipeline.seed = mix_seed(cfg.corruption_seed, ci);

                TrainConfig train_cfg = cfg.train;
                train_cfg.collect_trace = false;

                std::vector<LabeledSample> train, test;
                for (std::size_t k = 0; k < items.size(); ++k) {
                    LabeledSample s = finalize_item(items[k], pipeline, k);
                    (items[k].train ? train : test).push_back(std::move(s));
                }
                TrainOutcome outcome = train_model(train, test, train_cfg);
                cell.accuracy = evaluate_accuracy(outcome.model, test);
                cell.train_seconds = outcome.train_seconds;
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_robustness_csv(std::ostream& os, std::span<const RobustnessCell> cells) {
    os << "condition,feature_mode,accuracy,train_seconds,error\n";
    os << std::setprecision(17);
    for (const RobustnessCell& cell : cells) {
        os << cell.condition << ',' << cell.feature_mode << ',';
        if (cell.ok) {
            os << cell.accuracy << ',' << cell.train_seconds << ',';
        } else {
            std::string msg = cell.error;
            for (char& c : msg)
                if (c == ',' || c == '\n') c = ';';
            os << ",," << msg;
        }
        os << '\n';
    }
}

} // namespace tracenorm
