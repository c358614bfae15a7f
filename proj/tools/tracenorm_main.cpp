// tracenorm command-line front end: rpca, train, predict, robustness, synth.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "tracenorm/dataset.hpp"
#include "tracenorm/errors.hpp"
#include "tracenorm/experiment.hpp"
#include "tracenorm/linalg.hpp"
#include "tracenorm/matrix_io.hpp"
#include "tracenorm/rpca.hpp"

namespace tn = tracenorm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 64;
constexpr int kExitFormat = 65;
constexpr int kExitDimension = 66;
constexpr int kExitNoConverge = 67;
constexpr int kExitInternal = 70;

void print_kv(const std::string& key, const std::string& value) {
    std::cout << key << '=' << value << '\n';
}

void print_kv(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    print_kv(key, std::string(buf));
}

std::size_t rank_at(const tn::Matrix& m, double rel_tol) {
    tn::SvdFactors f = tn::svd(m);
    if (f.s.empty() || f.s.front() <= 0.0) return 0;
    std::size_t r = 0;
    for (double s : f.s)
        if (s > rel_tol * f.s.front()) ++r;
    return r;
}

// flags shared by train/predict/robustness that shape the feature pipeline
struct PipelineFlags {
    double snr_db = std::nan("");
    double le_fraction = 0.0;
    bool use_rpca = false;
    double rpca_lambda = 0.0;
    std::size_t n_frames = 50;
    double frame_seconds = 0.020;
    std::uint64_t seed = 0;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f, bool with_corruption) {
    if (with_corruption) {
        cmd->add_option("--snr-db", f.snr_db,
                        "Corrupt inputs with white Gaussian noise at this SNR (dB)");
        cmd->add_option("--le-fraction", f.le_fraction,
                        "Corrupt this fraction of entries with large errors (0,1]");
    }
    cmd->add_flag("--use-rpca", f.use_rpca, "Replace each matrix by its low-rank component");
    cmd->add_option("--rpca-lambda", f.rpca_lambda,
                    "Sparsity weight for the low-rank split (0 = 1/sqrt(max(m,n)))");
    cmd->add_option("--frames", f.n_frames, "Frames per segment for WAV inputs");
    cmd->add_option("--frame-seconds", f.frame_seconds, "Frame duration for WAV inputs");
    cmd->add_option("--seed", f.seed, "Seed for corruption draws and stream shuffling");
}

tn::PipelineConfig pipeline_config(const PipelineFlags& f) {
    tn::PipelineConfig p;
    const bool wgn = !std::isnan(f.snr_db);
    const bool le = f.le_fraction > 0.0;
    if (wgn && le)
        throw CLI::ValidationError("--snr-db and --le-fraction are mutually exclusive");
    if (wgn)
        p.corruption = {tn::CorruptionSpec::Kind::wgn, f.snr_db, 0.0};
    else if (le)
        p.corruption = {tn::CorruptionSpec::Kind::large_errors, 0.0, f.le_fraction};
    p.use_rpca = f.use_rpca;
    p.rpca_lambda = f.rpca_lambda;
    p.seed = f.seed;
    return p;
}

// key=value file applied to options the command line did not set, so
// explicit flags always win
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw tn::FormatError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw tn::FormatError(path + ":" + std::to_string(line_no) + ": expected key=value");
        auto trim = [](std::string v) {
            const auto b = v.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = v.find_last_not_of(" \t\r");
            return v.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw CLI::ValidationError("unknown config key '" + key + "' in " + path);
        if (opt->count() == 0) {
            opt->add_result(value);
            opt->run_callback();
        }
    }
}

void require_value(const std::string& value, const char* flag) {
    if (value.empty()) throw CLI::ValidationError(std::string(flag) + " is required");
}

tn::FeatureConfig feature_config(const PipelineFlags& f) {
    tn::FeatureConfig cfg;
    cfg.n_frames = f.n_frames;
    cfg.frame_seconds = f.frame_seconds;
    return cfg;
}

struct SplitSamples {
    std::vector<tn::LabeledSample> train, test;
    std::vector<std::string> train_names, test_names;
};

SplitSamples materialize(const std::string& manifest_path, const PipelineFlags& flags) {
    const auto entries = tn::load_manifest(manifest_path);
    const auto items = tn::load_items(entries, feature_config(flags));
    const tn::PipelineConfig pipeline = pipeline_config(flags);
    SplitSamples out;
    for (std::size_t k = 0; k < items.size(); ++k) {
        tn::LabeledSample s = tn::finalize_item(items[k], pipeline, k);
        if (items[k].train) {
            out.train.push_back(std::move(s));
            out.train_names.push_back(items[k].name);
        } else {
            out.test.push_back(std::move(s));
            out.test_names.push_back(items[k].name);
        }
    }
    return out;
}

int run_rpca(const std::string& input, const std::string& out_prefix, const tn::RpcaConfig& cfg) {
    const tn::Matrix d = tn::load_matrix(input);
    const tn::RpcaDecomposition dec = tn::rpca_ialm(d, cfg);
    tn::save_matrix(out_prefix + "_A.txt", dec.a);
    tn::save_matrix(out_prefix + "_E.txt", dec.e);
    print_kv("rank", double(rank_at(dec.a, 1e-6)));
    print_kv("residual", dec.residual);
    print_kv("iterations", double(dec.iterations));
    print_kv("converged", dec.converged ? "1" : "0");
    return dec.converged ? kExitOk : kExitNoConverge;
}

int run_train(const std::string& manifest, const PipelineFlags& flags, tn::TrainConfig cfg,
              const std::string& model_path, const std::string& trace_path) {
    SplitSamples data = materialize(manifest, flags);
    if (data.train.empty()) throw CLI::ValidationError("manifest has no train entries");
    cfg.seed = flags.seed;
    cfg.collect_trace = !trace_path.empty();

    tn::TrainOutcome outcome = tn::train_model(data.train, data.test, cfg);
    tn::save_model(model_path, outcome.model);
    if (!trace_path.empty()) {
        std::ofstream os(trace_path);
        if (!os) throw tn::FormatError("cannot open '" + trace_path + "' for writing");
        tn::write_trace_csv(os, outcome.trace);
    }

    print_kv("trainer", std::string(tn::trainer_name(cfg.trainer)));
    print_kv("train_samples", double(data.train.size()));
    print_kv("converged", outcome.converged ? "1" : "0");
    print_kv("train_seconds", outcome.train_seconds);
    print_kv("objective", tn::objective(data.train, outcome.model));
    if (!data.test.empty())
        print_kv("test_accuracy", tn::evaluate_accuracy(outcome.model, data.test));

    if (cfg.trainer == tn::TrainerKind::apg && !outcome.converged) return kExitNoConverge;
    return kExitOk;
}

int run_predict(const std::string& model_path, const std::string& manifest,
                const PipelineFlags& flags, const std::string& out_path) {
    const tn::LinearMatrixModel model = tn::load_model(model_path);
    SplitSamples data = materialize(manifest, flags);
    if (data.test.empty()) throw CLI::ValidationError("manifest has no test entries");

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw tn::FormatError("cannot open '" + out_path + "' for writing");
    }
    std::ostream& os = out_path.empty() ? std::cout : file;

    os << "path,score,predicted,true\n";
    char buf[64];
    std::size_t correct = 0, evaluated = 0;
    for (std::size_t k = 0; k < data.test.size(); ++k) {
        try {
            const tn::Prediction p = tn::predict(model, data.test[k].x);
            std::snprintf(buf, sizeof(buf), "%.17g", p.score);
            os << data.test_names[k] << ',' << buf << ',' << (p.label > 0 ? "+1" : "-1") << ','
               << (data.test[k].y > 0 ? "+1" : "-1") << '\n';
            if (p.label == data.test[k].y) ++correct;
            ++evaluated;
        } catch (const tn::DimensionError& e) {
            std::cerr << "skipping " << data.test_names[k] << ": " << e.what() << '\n';
        }
    }
    if (evaluated == 0) throw tn::DimensionError("no test entry matches the model dimensions");
    print_kv("evaluated", double(evaluated));
    print_kv("accuracy", double(correct) / double(evaluated));
    return kExitOk;
}

int run_robustness(const std::string& manifest, const PipelineFlags& flags, tn::TrainConfig train,
                   const std::string& out_path) {
    const auto entries = tn::load_manifest(manifest);
    const auto items = tn::load_items(entries, feature_config(flags));

    tn::RobustnessConfig cfg;
    train.seed = flags.seed;
    train.collect_trace = false;
    cfg.train = train;
    cfg.rpca_lambda = flags.rpca_lambda;
    cfg.corruption_seed = flags.seed;
    const auto cells = tn::run_robustness(items, cfg);

    if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw tn::FormatError("cannot open '" + out_path + "' for writing");
        tn::write_robustness_csv(os, cells);
    }
    tn::write_robustness_csv(std::cout, cells);
    return kExitOk;
}

int run_synth(const tn::SynthConfig& cfg, const std::string& out_dir) {
    const auto items = tn::make_synthetic_dataset(cfg);
    const std::string manifest = tn::write_dataset(out_dir, items);
    print_kv("items", double(items.size()));
    print_kv("manifest", manifest);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trace-norm-regularized learning for matrix-shaped samples"};
    app.require_subcommand(1);
    std::function<int()> selected;

    // rpca
    auto* rpca_cmd = app.add_subcommand("rpca", "Split a matrix into low-rank plus sparse parts");
    static std::string rpca_input, rpca_out, rpca_config;
    static tn::RpcaConfig rpca_cfg;
    rpca_cmd->add_option("input", rpca_input, "Matrix text file")->required();
    rpca_cmd->add_option("--config", rpca_config, "key=value option file");
    rpca_cmd->add_option("--out", rpca_out, "Output prefix for <prefix>_A.txt and <prefix>_E.txt");
    rpca_cmd->add_option("--lambda", rpca_cfg.lambda, "Sparsity weight (0 = 1/sqrt(max(m,n)))");
    rpca_cmd->add_option("--mu0", rpca_cfg.mu0, "Initial penalty (0 = 1.25/||D||_2)");
    rpca_cmd->add_option("--rho", rpca_cfg.rho, "Penalty growth factor (> 1)");
    rpca_cmd->add_option("--tol", rpca_cfg.tol, "Relative feasibility tolerance");
    rpca_cmd->add_option("--max-iter", rpca_cfg.max_iter, "Iteration cap");
    rpca_cmd->callback([&selected, rpca_cmd]() {
        selected = [rpca_cmd]() {
            if (!rpca_config.empty()) apply_config_file(rpca_cmd, rpca_config);
            require_value(rpca_out, "--out");
            return run_rpca(rpca_input, rpca_out, rpca_cfg);
        };
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "Fit a linear matrix classifier");
    static std::string train_manifest, train_model_out, train_trace_out, train_trainer = "apg";
    static std::string train_config;
    static PipelineFlags train_flags;
    static tn::TrainConfig train_cfg;
    train_cmd->add_option("--config", train_config, "key=value option file");
    train_cmd->add_option("--manifest", train_manifest, "Dataset manifest CSV");
    train_cmd->add_option("--out", train_model_out, "Model output path");
    train_cmd->add_option("--trace", train_trace_out, "Convergence trace CSV path");
    train_cmd->add_option("--trainer", train_trainer,
                          "apg | ol_apg | ol_iapg | ol_apg_batch | ol_iapg_batch");
    train_cmd->add_option("--lambda", train_cfg.lambda, "Trace-norm weight");
    train_cmd->add_option("--eps1", train_cfg.eps1, "Relative weight-change tolerance");
    train_cmd->add_option("--eps2", train_cfg.eps2, "Relative bias-change tolerance");
    train_cmd->add_option("--max-iter", train_cfg.max_iter, "Batch iteration / online inner cap");
    train_cmd->add_option("--batch-size", train_cfg.batch_size, "Mini-batch size (mu)");
    add_pipeline_flags(train_cmd, train_flags, /*with_corruption=*/true);
    train_cmd->callback([&selected, train_cmd]() {
        selected = [train_cmd]() {
            if (!train_config.empty()) apply_config_file(train_cmd, train_config);
            require_value(train_manifest, "--manifest");
            require_value(train_model_out, "--out");
            const auto kind = tn::parse_trainer(train_trainer);
            if (!kind) throw CLI::ValidationError("unknown trainer '" + train_trainer + "'");
            train_cfg.trainer = *kind;
            return run_train(train_manifest, train_flags, train_cfg, train_model_out,
                             train_trace_out);
        };
    });

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "Score the test split with a saved model");
    static std::string predict_model, predict_manifest, predict_out, predict_config;
    static PipelineFlags predict_flags;
    predict_cmd->add_option("--config", predict_config, "key=value option file");
    predict_cmd->add_option("--model", predict_model, "Model file");
    predict_cmd->add_option("--manifest", predict_manifest, "Dataset manifest CSV");
    predict_cmd->add_option("--out", predict_out, "Prediction CSV path (default: stdout)");
    add_pipeline_flags(predict_cmd, predict_flags, /*with_corruption=*/true);
    predict_cmd->callback([&selected, predict_cmd]() {
        selected = [predict_cmd]() {
            if (!predict_config.empty()) apply_config_file(predict_cmd, predict_config);
            require_value(predict_model, "--model");
            require_value(predict_manifest, "--manifest");
            return run_predict(predict_model, predict_manifest, predict_flags, predict_out);
        };
    });

    // robustness
    auto* robust_cmd =
        app.add_subcommand("robustness", "Accuracy sweep over corruption conditions");
    static std::string robust_manifest, robust_out, robust_trainer = "apg";
    static std::string robust_config;
    static PipelineFlags robust_flags;
    static tn::TrainConfig robust_cfg;
    robust_cmd->add_option("--config", robust_config, "key=value option file");
    robust_cmd->add_option("--manifest", robust_manifest, "Dataset manifest CSV");
    robust_cmd->add_option("--out", robust_out, "Results CSV path");
    robust_cmd->add_option("--trainer", robust_trainer,
                           "apg | ol_apg | ol_iapg | ol_apg_batch | ol_iapg_batch");
    robust_cmd->add_option("--lambda", robust_cfg.lambda, "Trace-norm weight");
    robust_cmd->add_option("--eps1", robust_cfg.eps1, "Relative weight-change tolerance");
    robust_cmd->add_option("--eps2", robust_cfg.eps2, "Relative bias-change tolerance");
    robust_cmd->add_option("--max-iter", robust_cfg.max_iter, "Batch iteration / online inner cap");
    robust_cmd->add_option("--batch-size", robust_cfg.batch_size, "Mini-batch size (mu)");
    robust_cmd->add_option("--rpca-lambda", robust_flags.rpca_lambda,
                           "Sparsity weight for rpca-mode cells (0 = auto)");
    robust_cmd->add_option("--frames", robust_flags.n_frames, "Frames per segment for WAV inputs");
    robust_cmd->add_option("--frame-seconds", robust_flags.frame_seconds,
                           "Frame duration for WAV inputs");
    robust_cmd->add_option("--seed", robust_flags.seed, "Corruption/shuffle seed");
    robust_cmd->callback([&selected, robust_cmd]() {
        selected = [robust_cmd]() {
            if (!robust_config.empty()) apply_config_file(robust_cmd, robust_config);
            require_value(robust_manifest, "--manifest");
            const auto kind = tn::parse_trainer(robust_trainer);
            if (!kind) throw CLI::ValidationError("unknown trainer '" + robust_trainer + "'");
            robust_cfg.trainer = *kind;
            return run_robustness(robust_manifest, robust_flags, robust_cfg, robust_out);
        };
    });

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a two-class synthetic dataset");
    static std::string synth_out, synth_config;
    static tn::SynthConfig synth_cfg;
    synth_cmd->add_option("--config", synth_config, "key=value option file");
    synth_cmd->add_option("--out", synth_out, "Output directory");
    synth_cmd->add_option("--rows", synth_cfg.rows, "Matrix rows");
    synth_cmd->add_option("--cols", synth_cfg.cols, "Matrix columns");
    synth_cmd->add_option("--rank", synth_cfg.rank, "Latent rank per class");
    synth_cmd->add_option("--train", synth_cfg.train_per_class, "Training samples per class");
    synth_cmd->add_option("--test", synth_cfg.test_per_class, "Test samples per class");
    synth_cmd->add_option("--coeff-std", synth_cfg.coeff_std, "Per-sample coefficient spread");
    synth_cmd->add_option("--noise", synth_cfg.noise_sigma, "Dense Gaussian noise level");
    synth_cmd->add_option("--seed", synth_cfg.seed, "Generator seed");
    synth_cmd->callback([&selected, synth_cmd]() {
        selected = [synth_cmd]() {
            if (!synth_config.empty()) apply_config_file(synth_cmd, synth_config);
            require_value(synth_out, "--out");
            return run_synth(synth_cfg, synth_out);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        return selected ? selected() : kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const tn::FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFormat;
    } catch (const tn::DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDimension;
    } catch (const tn::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoConverge;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
