#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracenorm/classifier.hpp"
#include "tracenorm/dataset.hpp"
#include "tracenorm/online.hpp"

namespace tracenorm {

/// The five trainer variants: the batch solver, the exact and inexact online
/// solvers, and their mini-batch forms.
enum class TrainerKind { apg, ol_apg, ol_iapg, ol_apg_batch, ol_iapg_batch };

std::string_view trainer_name(TrainerKind kind);
std::optional<TrainerKind> parse_trainer(std::string_view name);

struct TrainConfig {
    TrainerKind trainer = TrainerKind::apg;
    double lambda = 1.0;
    double eps1 = 1e-8;
    double eps2 = 1e-8;
    int max_iter = 2000;        // batch iteration cap, or the online inner cap
    std::size_t batch_size = 5; // used by the *_batch trainers
    std::uint64_t seed = 0;     // stream shuffling for the online trainers
    bool collect_trace = true;  // per-step objective/accuracy rows cost extra work
};

/// One convergence-trace record: after the t-th batch iteration or after t
/// streamed samples. The objective is evaluated over the whole training set;
/// test_accuracy is NaN when no test split was supplied.
struct TraceRow {
    std::size_t t = 0;
    double wall_seconds = 0.0;
    double objective = 0.0;
    double test_accuracy = 0.0;
};

struct TrainOutcome {
    LinearMatrixModel model;
    std::vector<TraceRow> trace;
    bool converged = false;     // batch: solver converged; online: last solve did
    double rel_change_w = 0.0;
    double rel_change_b = 0.0;
    double train_seconds = 0.0;
};

/// Train with the selected variant. Online trainers stream the training set
/// in a seeded shuffled order; the batch trainer consumes it as given.
TrainOutcome train_model(std::span<const LabeledSample> train,
                         std::span<const LabeledSample> test, const TrainConfig& cfg);

/// Fraction of samples whose predicted sign matches the label.
double evaluate_accuracy(const LinearMatrixModel& model, std::span<const LabeledSample> samples);

/// Header "t,wall_seconds,objective,test_accuracy"; the accuracy cell is
/// empty when unavailable.
void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows);

/// The seven corruption conditions of the robustness sweep, in emitted order.
std::vector<std::pair<std::string, CorruptionSpec>> robustness_conditions();

struct RobustnessConfig {
    TrainConfig train;
    double rpca_lambda = 0.0;  // 0: 1/sqrt(max(m, n)) per matrix
    std::uint64_t corruption_seed = 0;
};

struct RobustnessCell {
    std::string condition;
    std::string feature_mode;  // "plain" or "rpca"
    double accuracy = 0.0;
    double train_seconds = 0.0;
    bool ok = false;
    std::string error;
};

/// For every condition x {plain, rpca}: corrupt each item (same draws for
/// both feature modes), run the per-item pipeline, train on the train split,
/// and score the test split. Failed cells carry their error and the sweep
/// continues. Returns 14 rows.
std::vector<RobustnessCell> run_robustness(std::span<const DatasetItem> items,
                                           const RobustnessConfig& cfg);

/// Header "condition,feature_mode,accuracy,train_seconds[,error]".
void write_robustness_csv(std::ostream& os, std::span<const RobustnessCell> cells);

} // namespace tracenorm
