#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "test_util.hpp"
#include "tracenorm/errors.hpp"
#include "tracenorm/linalg.hpp"
#include "tracenorm/online.hpp"

using namespace tracenorm;
using tn_test::random_matrix;
using tn_test::rel_error;

namespace {

std::vector<LabeledSample> random_samples(std::size_t count, std::size_t rows, std::size_t cols,
                                          std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<LabeledSample> out;
    for (std::size_t i = 0; i < count; ++i) {
        Matrix x(rows, cols);
        for (double& v : x.values()) v = dist(gen);
        out.push_back({std::move(x), (gen() & 1) ? 1.0 : -1.0});
    }
    return out;
}

OnlineSufficientStats stats_of(std::span<const LabeledSample> samples) {
    OnlineSufficientStats stats(samples.front().x.rows(), samples.front().x.cols());
    stats_update(stats, samples);
    return stats;
}

} // namespace

TEST_CASE("stats update single sample") {
    Matrix x = random_matrix(3, 2, 1);
    std::vector<LabeledSample> one = {{x, 1.0}};
    OnlineSufficientStats stats = stats_of(one);
    CHECK(rel_error(stats.a, x) == 0.0);
    CHECK(stats.c == 1.0);
    CHECK(rel_error(stats.d, x) == 0.0);
    const double f = frobenius_norm(x);
    CHECK(stats.l == doctest::Approx(2.0 * 6.0 * f * f));
    CHECK(stats.t == 1);
}

TEST_CASE("stats update cancels opposite labels in A and c only") {
    Matrix x = random_matrix(2, 2, 2);
    std::vector<LabeledSample> pair = {{x, 1.0}, {x, -1.0}};
    OnlineSufficientStats stats = stats_of(pair);
    CHECK(frobenius_norm(stats.a) == 0.0);
    CHECK(stats.c == 0.0);
    CHECK(rel_error(stats.d, x * 2.0) < 1e-15);
    CHECK(stats.t == 2);
}

TEST_CASE("stats update is batch-order equivalent") {
    auto samples = random_samples(5, 3, 2, 3);
    OnlineSufficientStats whole(3, 2), one_at_a_time(3, 2);
    stats_update(whole, samples);
    for (const LabeledSample& s : samples)
        stats_update(one_at_a_time, std::span<const LabeledSample>(&s, 1));
    CHECK(rel_error(whole.a, one_at_a_time.a) < 1e-12);
    CHECK(rel_error(whole.d, one_at_a_time.d) < 1e-12);
    CHECK(rel_error(whole.b.values(), one_at_a_time.b.values()) < 1e-12);
    CHECK(whole.c == doctest::Approx(one_at_a_time.c).epsilon(1e-12));
    CHECK(whole.l == doctest::Approx(one_at_a_time.l).epsilon(1e-12));
    CHECK(whole.t == one_at_a_time.t);
}

TEST_CASE("stats fields match their definitions over the stored list") {
    auto samples = random_samples(9, 3, 3, 4);
    OnlineSufficientStats stats = stats_of(samples);

    Matrix a_ref(3, 3), d_ref(3, 3);
    double c_ref = 0.0, l_ref = 0.0;
    for (const LabeledSample& s : samples) {
        a_ref.add_scaled(s.y, s.x);
        d_ref += s.x;
        c_ref += s.y;
        const double f = frobenius_norm(s.x);
        l_ref += 2.0 * 9.0 * f * f;
    }
    CHECK(rel_error(stats.a, a_ref) < 1e-14);
    CHECK(rel_error(stats.d, d_ref) < 1e-14);
    CHECK(stats.c == doctest::Approx(c_ref));
    CHECK(stats.l == doctest::Approx(l_ref));
    CHECK(stats.t == samples.size());
}

TEST_CASE("L grows strictly with every nonzero sample") {
    auto samples = random_samples(6, 2, 3, 5);
    OnlineSufficientStats stats(2, 3);
    double prev = 0.0;
    for (const LabeledSample& s : samples) {
        stats_update(stats, std::span<const LabeledSample>(&s, 1));
        CHECK(stats.l > prev);
        prev = stats.l;
    }
}

TEST_CASE("stats update rejects mismatched samples") {
    OnlineSufficientStats stats(2, 2);
    std::vector<LabeledSample> bad = {{Matrix(3, 2, 1.0), 1.0}};
    CHECK_THROWS_AS(stats_update(stats, bad), DimensionError);
    std::vector<LabeledSample> mislabeled = {{Matrix(2, 2, 1.0), 2.0}};
    CHECK_THROWS_AS(stats_update(stats, mislabeled), std::invalid_argument);
}

TEST_CASE("surrogate gradient identities") {
    SUBCASE("single sample at the origin") {
        Matrix x = random_matrix(3, 2, 6);
        std::vector<LabeledSample> one = {{x, -1.0}};
        OnlineSufficientStats stats = stats_of(one);
        Matrix g = surrogate_gradient(stats, Matrix(3, 2), 0.0);
        CHECK(rel_error(g, x * 2.0) < 1e-13);  // -2 y X with y = -1
    }
    SUBCASE("residual-free point") {
        std::vector<LabeledSample> same = {{Matrix(2, 2, 0.5), 1.0}, {Matrix(2, 2, 0.5), 1.0}};
        OnlineSufficientStats stats = stats_of(same);
        CHECK(frobenius_norm(surrogate_gradient(stats, Matrix(2, 2), 1.0)) < 1e-14);
    }
    SUBCASE("twenty samples against the direct gradient") {
        auto samples = random_samples(20, 4, 3, 7);
        OnlineSufficientStats stats = stats_of(samples);
        Matrix z = random_matrix(4, 3, 8);
        const double b = -0.4;
        Matrix direct = gradient(samples, z, b);
        CHECK(rel_error(surrogate_gradient(stats, z, b), direct) < 1e-10);
    }
    SUBCASE("dimension mismatch") {
        OnlineSufficientStats stats(2, 2);
        CHECK_THROWS_AS(surrogate_gradient(stats, Matrix(3, 3), 0.0), DimensionError);
    }
}

TEST_CASE("surrogate gradient stays faithful along a stream prefix") {
    auto samples = random_samples(30, 3, 3, 9);
    OnlineSufficientStats stats(3, 3);
    Matrix z = random_matrix(3, 3, 10);
    for (std::size_t t = 0; t < samples.size(); ++t) {
        stats_update(stats, std::span<const LabeledSample>(&samples[t], 1));
        std::span<const LabeledSample> prefix(samples.data(), t + 1);
        Matrix direct = gradient(prefix, z, 0.2);
        CHECK(rel_error(surrogate_gradient(stats, z, 0.2), direct) < 1e-10);
    }
}

TEST_CASE("surrogate objective equals the direct objective") {
    auto samples = random_samples(12, 3, 4, 11);
    OnlineSufficientStats stats = stats_of(samples);
    LinearMatrixModel model{random_matrix(3, 4, 12), 0.3, 0.7};
    const double direct = objective(samples, model);
    const double fast = surrogate_objective(stats, model.w, model.b, model.lambda);
    CHECK(fast == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("online fit on a single sample matches the batch fit") {
    auto samples = random_samples(1, 3, 3, 13);
    OnlineConfig cfg;
    cfg.lambda = 1e-3;
    cfg.inner_max_iter = 100000;
    OnlineFitResult online = online_fit(samples, cfg);

    ApgConfig batch_cfg;
    batch_cfg.lambda = cfg.lambda;
    batch_cfg.max_iter = 100000;
    FitResult batch = apg_fit(samples, batch_cfg);

    const double online_obj = objective(samples, online.model);
    const double batch_obj = objective(samples, batch.model);
    CHECK(std::abs(online_obj - batch_obj) < 1e-8);
}

TEST_CASE("huge lambda keeps the weights at zero and the bias at the label mean") {
    auto samples = random_samples(10, 2, 3, 14);
    OnlineConfig cfg;
    cfg.lambda = 1e9;
    double c = 0.0;
    std::size_t seen = 0;
    online_fit(samples, cfg, [&](const OnlineStepInfo& info) {
        c += samples[seen].y;
        ++seen;
        CHECK(frobenius_norm(info.model.w) == 0.0);
        CHECK(info.model.b == doctest::Approx(c / double(seen)).epsilon(1e-12));
        CHECK(info.t == seen);
    });
    CHECK(seen == samples.size());
}

TEST_CASE("exact online matches the batch solver after a full pass") {
    auto samples = tn_test::structured_samples(100, 4, 4, 2, 0.25, 1.0, 15);

    ApgConfig batch_cfg;
    batch_cfg.lambda = 200.0;
    batch_cfg.max_iter = 100000;
    FitResult batch = apg_fit(samples, batch_cfg);
    REQUIRE(batch.converged);
    const double batch_obj = objective(samples, batch.model);

    OnlineConfig cfg;
    cfg.lambda = batch_cfg.lambda;
    OnlineFitResult online = online_fit(samples, cfg);
    const double online_obj = objective(samples, online.model);
    CHECK(std::abs(online_obj - batch_obj) <= 0.01 * batch_obj);

    cfg.mode = OnlineMode::inexact;
    OnlineFitResult inexact = online_fit(samples, cfg);
    const double inexact_obj = objective(samples, inexact.model);
    CHECK(std::abs(inexact_obj - batch_obj) <= 0.05 * batch_obj);
}

TEST_CASE("warm-started exact solves track the batch optimum along the stream") {
    auto samples = random_samples(50, 4, 3, 16);
    OnlineConfig cfg;
    cfg.lambda = 1.0;
    cfg.inner_max_iter = 100000;

    std::vector<double> online_obj;
    online_fit(samples, cfg, [&](const OnlineStepInfo& info) {
        std::span<const LabeledSample> prefix(samples.data(), info.t);
        online_obj.push_back(objective(prefix, info.model));
    });

    ApgConfig batch_cfg;
    batch_cfg.lambda = cfg.lambda;
    batch_cfg.max_iter = 100000;
    for (std::size_t t = 1; t <= samples.size(); t += 7) {
        std::span<const LabeledSample> prefix(samples.data(), t);
        FitResult batch = apg_fit(prefix, batch_cfg);
        REQUIRE(batch.converged);
        const double batch_obj = objective(prefix, batch.model);
        CHECK(std::abs(online_obj[t - 1] - batch_obj) <= 1e-6 * std::max(1.0, batch_obj));
    }
}

TEST_CASE("mini-batch statistics are independent of the batch size") {
    auto samples = random_samples(60, 3, 2, 17);
    OnlineSufficientStats single(3, 2);
    for (const LabeledSample& s : samples)
        stats_update(single, std::span<const LabeledSample>(&s, 1));

    for (std::size_t mu : {2u, 5u, 10u}) {
        OnlineSufficientStats batched(3, 2);
        for (std::size_t start = 0; start < samples.size(); start += mu)
            stats_update(batched, std::span<const LabeledSample>(samples.data() + start, mu));
        CHECK(rel_error(batched.a, single.a) < 1e-12);
        CHECK(rel_error(batched.d, single.d) < 1e-12);
        CHECK(rel_error(batched.b.values(), single.b.values()) < 1e-12);
        CHECK(batched.c == doctest::Approx(single.c).epsilon(1e-12));
        CHECK(batched.l == doctest::Approx(single.l).epsilon(1e-12));
        CHECK(batched.t == single.t);
    }
}

TEST_CASE("inexact mode spends exactly two SVDs per batch") {
    auto samples = random_samples(12, 3, 3, 18);
    OnlineConfig cfg;
    cfg.mode = OnlineMode::inexact;

    reset_svd_call_count();
    OnlineFitResult inexact = online_fit(samples, cfg);
    CHECK(svd_call_count() == 2 * samples.size());
    CHECK(inexact.total_inner_steps == 2 * samples.size());

    cfg.batch_size = 4;
    reset_svd_call_count();
    online_fit(samples, cfg);
    CHECK(svd_call_count() == 2 * 3);

    cfg.batch_size = 1;
    cfg.mode = OnlineMode::exact;
    reset_svd_call_count();
    OnlineFitResult exact = online_fit(samples, cfg);
    CHECK(svd_call_count() == exact.total_inner_steps);
    CHECK(exact.total_inner_steps > inexact.total_inner_steps);
}

TEST_CASE("batch slicing covers a remainder chunk") {
    auto samples = random_samples(7, 2, 2, 19);
    OnlineConfig cfg;
    cfg.batch_size = 3;
    cfg.inner_max_iter = 50;
    std::vector<std::size_t> ts;
    OnlineFitResult res = online_fit(samples, cfg, [&](const OnlineStepInfo& info) {
        ts.push_back(info.t);
    });
    CHECK(res.solves == 3);
    CHECK(ts == std::vector<std::size_t>{3, 6, 7});
    CHECK(res.stats.t == 7);
}

TEST_CASE("stream dimension inconsistency reports the offending index") {
    auto samples = random_samples(5, 2, 2, 20);
    samples[3].x = Matrix(3, 2, 1.0);
    OnlineConfig cfg;
    try {
        online_fit(samples, cfg);
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
}

TEST_CASE("observer reports the objective over the accumulated set") {
    auto samples = random_samples(8, 3, 2, 21);
    OnlineConfig cfg;
    cfg.lambda = 0.5;
    cfg.inner_max_iter = 5000;
    online_fit(samples, cfg, [&](const OnlineStepInfo& info) {
        std::span<const LabeledSample> prefix(samples.data(), info.t);
        CHECK(info.objective == doctest::Approx(objective(prefix, info.model)).epsilon(1e-9));
    });
}
