// Acceptance suite: one self-contained check per release criterion, one
// PASS/FAIL line each, nonzero exit if anything fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tracenorm/classifier.hpp"
#include "tracenorm/dataset.hpp"
#include "tracenorm/experiment.hpp"
#include "tracenorm/linalg.hpp"
#include "tracenorm/online.hpp"
#include "tracenorm/rpca.hpp"

using namespace tracenorm;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s %2d %-28s %s\n", pass ? "PASS" : "FAIL", number, name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(rows, cols);
    for (double& v : m.values()) v = dist(gen);
    return m;
}

std::vector<LabeledSample> random_samples(std::size_t count, std::size_t rows, std::size_t cols,
                                          std::mt19937_64& gen) {
    std::vector<LabeledSample> out;
    for (std::size_t i = 0; i < count; ++i) {
        Matrix x = random_matrix(rows, cols, gen);
        out.push_back({std::move(x), (gen() & 1) ? 1.0 : -1.0});
    }
    return out;
}

double smooth_loss(std::span<const LabeledSample> samples, const Matrix& w, double b) {
    double loss = 0.0;
    for (const LabeledSample& s : samples) {
        const double r = s.y - trace_product(w, s.x) - b;
        loss += r * r;
    }
    return loss;
}

// 1. squared-loss gradient vs central finite differences on 500 random
//    instances with m,n <= 6 and s <= 8, relative error <= 1e-4, under 10 s
void criterion_gradient_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 gen(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t m = 1 + gen() % 6, n = 1 + gen() % 6, s = 1 + gen() % 8;
        auto samples = random_samples(s, m, n, gen);
        Matrix w = random_matrix(m, n, gen);
        const double b = std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
        Matrix g = gradient(samples, w, b);

        const double h = 1e-5;
        Matrix fd(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Matrix plus = w, minus = w;
                plus(i, j) += h;
                minus(i, j) -= h;
                fd(i, j) = (smooth_loss(samples, plus, b) - smooth_loss(samples, minus, b)) /
                           (2.0 * h);
            }
        worst = std::max(worst,
                         frobenius_norm(g - fd) / std::max(1.0, frobenius_norm(fd)));
    }
    const double secs = elapsed_seconds(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "worst rel err %.2e (limit 1e-4), %.2fs (limit 10s)",
                  worst, secs);
    report(1, "gradient-fd-oracle", worst <= 1e-4 && secs < 10.0, detail);
}

// 2. explicit Lipschitz constant bounds the gradient variation: 1000 random
//    (U, V) pairs per instance, zero violations
void criterion_lipschitz_bound() {
    std::mt19937_64 gen(2025);
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        const std::size_t m = 1 + gen() % 6, n = 1 + gen() % 6, s = 1 + gen() % 8;
        auto samples = random_samples(s, m, n, gen);
        const double lipschitz = lipschitz_constant(samples);
        const double b = 0.3;
        for (int pair = 0; pair < 1000; ++pair) {
            Matrix u = random_matrix(m, n, gen);
            Matrix v = random_matrix(m, n, gen);
            const double den = frobenius_norm(u - v);
            if (den == 0.0) continue;
            const double num = frobenius_norm(gradient(samples, u, b) - gradient(samples, v, b));
            worst_ratio = std::max(worst_ratio, num / (lipschitz * den));
            if (num > lipschitz * den) ++violations;
        }
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "%zu violations in 20000 pairs, worst ratio %.3f of L", violations, worst_ratio);
    report(2, "lipschitz-bound", violations == 0, detail);
}

// 3. after streaming 100 random 5x4 samples the statistic-based gradient
//    matches the per-sample gradient to 1e-10 relative
void criterion_gridtr_equivalence() {
    std::mt19937_64 gen(2026);
    auto samples = random_samples(100, 5, 4, gen);
    OnlineSufficientStats stats(5, 4);
    for (const LabeledSample& s : samples)
        stats_update(stats, std::span<const LabeledSample>(&s, 1));

    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        Matrix z = random_matrix(5, 4, gen);
        const double b = std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
        Matrix direct = gradient(samples, z, b);
        Matrix fast = surrogate_gradient(stats, z, b);
        worst = std::max(worst,
                         frobenius_norm(fast - direct) / std::max(1.0, frobenius_norm(direct)));
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "worst rel err %.2e (limit 1e-10)", worst);
    report(3, "gridtr-equivalence", worst <= 1e-10, detail);
}

// 4. rank-2 50x160 matrix with 5% gross corruption is recovered to 1e-3
//    relative error within 500 iterations and 30 s
void criterion_rpca_recovery() {
    const auto start = Clock::now();
    std::mt19937_64 gen(2027);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix p(50, 2), q(160, 2);
    for (double& v : p.values()) v = normal(gen);
    for (double& v : q.values()) v = normal(gen);
    Matrix a_true = p * q.transposed();

    const double scale = frobenius_norm(a_true) / std::sqrt(double(a_true.size()));
    Matrix d = a_true;
    std::vector<std::size_t> idx(d.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::uniform_real_distribution<double> big(-10.0 * scale, 10.0 * scale);
    const std::size_t count = d.size() / 20;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t pick = k + gen() % (idx.size() - k);
        std::swap(idx[k], idx[pick]);
        d.values()[idx[k]] = big(gen);
    }

    RpcaConfig cfg;
    cfg.lambda = 1.0 / std::sqrt(160.0);
    cfg.max_iter = 500;
    RpcaDecomposition dec = rpca_ialm(d, cfg);
    const double rel = frobenius_norm(dec.a - a_true) / frobenius_norm(a_true);
    const double secs = elapsed_seconds(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "rel err %.2e (limit 1e-3), %d iters (limit 500), %.2fs (limit 30s)", rel,
                  dec.iterations, secs);
    report(4, "rpca-exact-recovery",
           dec.converged && rel <= 1e-3 && dec.iterations <= 500 && secs < 30.0, detail);
}

std::vector<LabeledSample> agreement_stream() {
    SynthConfig d;
    d.rows = 4;
    d.cols = 4;
    d.rank = 2;
    d.train_per_class = 100;
    d.test_per_class = 0;
    d.coeff_std = 0.25;
    d.noise_sigma = 1.0;
    d.seed = 101;
    auto items = make_synthetic_dataset(d);
    std::vector<LabeledSample> samples;
    for (std::size_t k : shuffled_indices(items.size(), 1))
        samples.push_back({items[k].x, items[k].label});
    return samples;
}

// 5. on a 200-sample synthetic set the exact online solver lands within 1%
//    of the batch objective and the inexact one within 5%, inside 5 minutes
void criterion_batch_online_agreement() {
    const auto start = Clock::now();
    auto samples = agreement_stream();

    ApgConfig batch_cfg;
    batch_cfg.lambda = 200.0;
    batch_cfg.max_iter = 100000;
    FitResult batch = apg_fit(samples, batch_cfg);
    const double batch_obj = objective(samples, batch.model);

    OnlineConfig online_cfg;
    online_cfg.lambda = batch_cfg.lambda;
    OnlineFitResult exact = online_fit(samples, online_cfg);
    const double exact_rel = std::abs(objective(samples, exact.model) - batch_obj) / batch_obj;

    online_cfg.mode = OnlineMode::inexact;
    OnlineFitResult inexact = online_fit(samples, online_cfg);
    const double inexact_rel = std::abs(objective(samples, inexact.model) - batch_obj) / batch_obj;

    const double secs = elapsed_seconds(start);
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "exact rel %.4f (limit 0.01), inexact rel %.4f (limit 0.05), %.1fs (limit 300s)",
                  exact_rel, inexact_rel, secs);
    report(5, "batch-online-agreement",
           batch.converged && exact_rel <= 0.01 && inexact_rel <= 0.05 && secs < 300.0, detail);
}

// 6. the inexact online solver spends exactly two SVDs per sample and
//    strictly fewer in total than the exact one on the same stream
void criterion_svd_budget() {
    auto samples = agreement_stream();

    OnlineConfig cfg;
    cfg.lambda = 200.0;
    cfg.mode = OnlineMode::inexact;
    reset_svd_call_count();
    online_fit(samples, cfg);
    const std::uint64_t inexact_svds = svd_call_count();

    cfg.mode = OnlineMode::exact;
    reset_svd_call_count();
    online_fit(samples, cfg);
    const std::uint64_t exact_svds = svd_call_count();

    char detail[128];
    std::snprintf(detail, sizeof(detail), "inexact %llu svds (= 2x%zu), exact %llu",
                  (unsigned long long)inexact_svds, samples.size(),
                  (unsigned long long)exact_svds);
    report(6, "inexact-svd-budget",
           inexact_svds == 2 * samples.size() && inexact_svds < exact_svds, detail);
}

// 7. on low-rank two-class data the cleaned features dominate the plain ones
//    at every large-error level, and plain accuracy falls harder at LE=10%,
//    on means over five seeds
void criterion_robustness_direction() {
    std::map<std::string, double> plain_mean, rpca_mean;
    const int seeds = 5;
    bool all_cells_ok = true;
    for (int rep = 1; rep <= seeds; ++rep) {
        SynthConfig d;
        d.rows = 24;
        d.cols = 20;
        d.rank = 2;
        d.train_per_class = 10;
        d.test_per_class = 8;
        d.coeff_std = 0.6;
        d.noise_sigma = 0.25;
        d.seed = std::uint64_t(rep) * 101;
        auto items = make_synthetic_dataset(d);

        RobustnessConfig cfg;
        cfg.train.lambda = 50.0;
        cfg.train.max_iter = 600;
        cfg.train.eps1 = 1e-5;
        cfg.train.eps2 = 1e-5;
        cfg.corruption_seed = std::uint64_t(rep) * 7919;
        for (const RobustnessCell& cell : run_robustness(items, cfg)) {
            if (!cell.ok) {
                all_cells_ok = false;
                continue;
            }
            auto& sums = cell.feature_mode == "plain" ? plain_mean : rpca_mean;
            sums[cell.condition] += cell.accuracy / double(seeds);
        }
    }

    const bool dominance = rpca_mean["le_10"] >= plain_mean["le_10"] &&
                           rpca_mean["le_30"] >= plain_mean["le_30"] &&
                           rpca_mean["le_50"] >= plain_mean["le_50"];
    const double plain_drop = plain_mean["normal"] - plain_mean["le_10"];
    const double rpca_drop = rpca_mean["normal"] - rpca_mean["le_10"];
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "le10 %.3f/%.3f le30 %.3f/%.3f le50 %.3f/%.3f (plain/rpca), "
                  "le10 drop %.3f vs %.3f",
                  plain_mean["le_10"], rpca_mean["le_10"], plain_mean["le_30"],
                  rpca_mean["le_30"], plain_mean["le_50"], rpca_mean["le_50"], plain_drop,
                  rpca_drop);
    report(7, "robustness-direction", all_cells_ok && dominance && plain_drop > rpca_drop,
           detail);
}

// 8. every non-capped trainer exit satisfies the relative-change stopping
//    test with guarded denominators at eps1 = eps2 = 1e-8
void criterion_stopping_honored() {
    std::mt19937_64 gen(2028);
    auto samples = random_samples(12, 3, 3, gen);

    ApgConfig batch_cfg;
    batch_cfg.lambda = 1.0;
    batch_cfg.max_iter = 100000;
    FitResult batch = apg_fit(samples, batch_cfg);
    bool ok = batch.converged && batch.rel_change_w < batch_cfg.eps1 &&
              batch.rel_change_b < batch_cfg.eps2;

    ApgConfig capped_cfg = batch_cfg;
    capped_cfg.max_iter = 3;
    FitResult capped = apg_fit(samples, capped_cfg);
    ok = ok && !capped.converged;

    OnlineConfig online_cfg;
    online_cfg.lambda = 1.0;
    online_cfg.inner_max_iter = 100000;
    OnlineFitResult online = online_fit(samples, online_cfg);
    ok = ok && online.last_solve_converged && online.rel_change_w < online_cfg.inner_eps1 &&
         online.rel_change_b < online_cfg.inner_eps2 && online.capped_solves == 0;

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "batch rel %.1e/%.1e, online rel %.1e/%.1e, capped run flagged %s",
                  batch.rel_change_w, batch.rel_change_b, online.rel_change_w,
                  online.rel_change_b, capped.converged ? "no" : "yes");
    report(8, "stopping-criterion", ok, detail);
}

// 9. statistics folded in mini-batches of 2, 5, and 10 match single-sample
//    streaming to 1e-12 relative
void criterion_minibatch_stats() {
    std::mt19937_64 gen(2029);
    auto samples = random_samples(60, 4, 3, gen);
    OnlineSufficientStats single(4, 3);
    for (const LabeledSample& s : samples)
        stats_update(single, std::span<const LabeledSample>(&s, 1));

    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    double worst = 0.0;
    for (std::size_t mu : {2u, 5u, 10u}) {
        OnlineSufficientStats batched(4, 3);
        for (std::size_t start = 0; start < samples.size(); start += mu)
            stats_update(batched, std::span<const LabeledSample>(samples.data() + start, mu));
        worst = std::max(worst, frobenius_norm(batched.a - single.a) /
                                    std::max(1.0, frobenius_norm(single.a)));
        worst = std::max(worst, frobenius_norm(batched.d - single.d) /
                                    std::max(1.0, frobenius_norm(single.d)));
        worst = std::max(worst, frobenius_norm(batched.b.values() - single.b.values()) /
                                    std::max(1.0, frobenius_norm(single.b.values())));
        worst = std::max(worst, rel(batched.c, single.c));
        worst = std::max(worst, rel(batched.l, single.l));
        if (batched.t != single.t) worst = 1.0;
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "worst rel diff %.2e (limit 1e-12)", worst);
    report(9, "minibatch-stats", worst <= 1e-12, detail);
}

// 10. two identical CLI train runs produce byte-identical model files and
//     trace CSVs once the wall-clock column is dropped
void criterion_cli_determinism() {
    const fs::path dir =
        fs::temp_directory_path() / ("tracenorm_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string base = dir.string();
    const std::string cli = TRACENORM_CLI_PATH;

    auto shell = [](const std::string& cmd) { return std::system(cmd.c_str()) == 0; };
    auto slurp = [](const std::string& path) {
        std::ifstream is(path);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    auto strip_wall = [](const std::string& csv) {
        std::stringstream in(csv), out;
        std::string line;
        while (std::getline(in, line)) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            out << line.substr(0, c1) << line.substr(c2) << '\n';
        }
        return out.str();
    };

    bool ok = shell(cli + " synth --out " + base + "/data --rows 6 --cols 5 --train 15 --test 5" +
                    " --noise 0.5 --seed 21 > /dev/null");
    const std::string train = cli + " train --manifest " + base + "/data/manifest.csv" +
                              " --trainer ol_apg --lambda 40 --max-iter 300 --seed 9";
    ok = ok && shell(train + " --out " + base + "/m1.txt --trace " + base + "/t1.csv > /dev/null");
    ok = ok && shell(train + " --out " + base + "/m2.txt --trace " + base + "/t2.csv > /dev/null");

    const std::string m1 = slurp(base + "/m1.txt"), m2 = slurp(base + "/m2.txt");
    const std::string t1 = slurp(base + "/t1.csv"), t2 = slurp(base + "/t2.csv");
    const bool models_equal = !m1.empty() && m1 == m2;
    const bool traces_equal = !t1.empty() && strip_wall(t1) == strip_wall(t2);
    fs::remove_all(dir);

    char detail[128];
    std::snprintf(detail, sizeof(detail), "models %s, traces (sans wall clock) %s",
                  models_equal ? "identical" : "differ", traces_equal ? "identical" : "differ");
    report(10, "cli-determinism", ok && models_equal && traces_equal, detail);
}

} // namespace

int main() {
    std::printf("acceptance criteria\n");
    criterion_gradient_oracle();
    criterion_lipschitz_bound();
    criterion_gridtr_equivalence();
    criterion_rpca_recovery();
    criterion_batch_online_agreement();
    criterion_svd_budget();
    criterion_robustness_direction();
    criterion_stopping_honored();
    criterion_minibatch_stats();
    criterion_cli_determinism();
    std::printf("%s (%d failure%s)\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures,
                g_failures == 1 ? "" : "s");
    return g_failures == 0 ? 0 : 1;
}
