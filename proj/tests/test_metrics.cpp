#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "obfscore/errors.hpp"
#include "obfscore/metrics.hpp"
#include "obfscore/quantile.hpp"
#include "obfscore/rng.hpp"
#include "support.hpp"

using namespace obfscore;

TEST_CASE("perfect prediction zeroes every error metric") {
    const std::vector<double> y{1.0, 2.0, 3.5, -4.0};
    CHECK(mape(y, y) == 0.0);
    CHECK(mae(y, y) == 0.0);
    CHECK(mse(y, y) == 0.0);
    CHECK(pcc(y, y) == doctest::Approx(1.0));
}

TEST_CASE("single-element example") {
    const std::vector<double> y{2.0}, yh{1.0};
    CHECK(mape(y, yh) == doctest::Approx(50.0));
    CHECK(mae(y, yh) == doctest::Approx(1.0));
    CHECK(mse(y, yh) == doctest::Approx(1.0));
}

TEST_CASE("mape excludes zero targets and reports the count") {
    const std::vector<double> y{0.0, 2.0, 0.0, 4.0};
    const std::vector<double> yh{5.0, 1.0, 9.0, 2.0};
    size_t excluded = 0;
    const double v = mape(y, yh, &excluded);
    CHECK(excluded == 2);
    CHECK(v == doctest::Approx(50.0));
    const std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS(mape(zeros, zeros), EmptyInput);
}

TEST_CASE("metrics match naive loop recomputation to 1e-12 relative") {
    Rng rng(99);
    for (int iter = 0; iter < 1000; ++iter) {
        const size_t n = 2 + rng.index(64);
        std::vector<double> y(n), yh(n);
        for (size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform(0.5, 20.0);
            yh[i] = y[i] + rng.uniform(-2.0, 2.0);
        }
        CHECK(mape(y, yh) == doctest::Approx(testsupport::naive_mape(y, yh)).epsilon(1e-12));
        CHECK(mae(y, yh) == doctest::Approx(testsupport::naive_mae(y, yh)).epsilon(1e-12));
        CHECK(mse(y, yh) == doctest::Approx(testsupport::naive_mse(y, yh)).epsilon(1e-12));
        CHECK(pcc(y, yh) == doctest::Approx(testsupport::naive_pcc(y, yh)).epsilon(1e-12));
    }
}

TEST_CASE("pcc affine invariance under positive slope") {
    Rng rng(123);
    for (int iter = 0; iter < 200; ++iter) {
        const size_t n = 3 + rng.index(40);
        std::vector<double> y(n), yh(n), y2(n), yh2(n);
        for (size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform(-5.0, 5.0);
            yh[i] = rng.uniform(-5.0, 5.0);
        }
        const double a = rng.uniform(0.1, 4.0), b = rng.uniform(-10.0, 10.0);
        const double c = rng.uniform(0.1, 3.0), d = rng.uniform(-10.0, 10.0);
        for (size_t i = 0; i < n; ++i) {
            y2[i] = a * y[i] + b;
            yh2[i] = c * yh[i] + d;
        }
        try {
            const double p1 = pcc(y, yh);
            const double p2 = pcc(y2, yh2);
            CHECK(std::fabs(p1 - p2) < 1e-9);
        } catch (const CorrelationUndefined&) {
            // zero-variance draw; nothing to compare
        }
    }
}

TEST_CASE("pcc degenerate inputs") {
    const std::vector<double> flat{2.0, 2.0, 2.0};
    const std::vector<double> ramp{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(pcc(flat, ramp), CorrelationUndefined);
    CHECK_THROWS_AS(pcc(ramp, flat), CorrelationUndefined);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(pcc(one, one), CorrelationUndefined);
    CHECK_THROWS_AS(mae({}, {}), EmptyInput);
}

TEST_CASE("mae <= sqrt(mse) on random inputs") {
    Rng rng(321);
    for (int iter = 0; iter < 500; ++iter) {
        const size_t n = 1 + rng.index(50);
        std::vector<double> y(n), yh(n);
        for (size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform(-10.0, 10.0);
            yh[i] = rng.uniform(-10.0, 10.0);
        }
        CHECK(mae(y, yh) <= std::sqrt(mse(y, yh)) + 1e-12);
    }
}

TEST_CASE("length-binned errors partition the corpus") {
    // 8-record fixture, bins checked by hand: lengths quartiles at
    // q1=2.75, q2=4.5, q3=6.25 over lengths 1..8.
    std::vector<double> len{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> y{10, 10, 10, 10, 10, 10, 10, 10};
    std::vector<double> yh{9, 9, 11, 11, 8, 8, 12, 12};
    const auto rep = length_binned_errors(len, y, yh);
    REQUIRE(rep.bins.size() == 4);
    size_t total = 0;
    for (const auto& b : rep.bins) total += b.n;
    CHECK(total == 8);
    CHECK(rep.bins[0].n == 2);  // lengths 1,2
    CHECK(rep.bins[1].n == 2);  // lengths 3,4
    CHECK(rep.bins[2].n == 2);  // lengths 5,6
    CHECK(rep.bins[3].n == 2);  // lengths 7,8
    CHECK(rep.bins[0].mae == doctest::Approx(1.0));
    CHECK(rep.bins[2].mae == doctest::Approx(2.0));
    CHECK(rep.bins[0].mape == doctest::Approx(10.0));
}

TEST_CASE("uniform errors give equal per-bin mae; proportional errors increase") {
    Rng rng(77);
    const size_t n = 400;
    std::vector<double> len(n), y(n), uniform_pred(n), prop_pred(n);
    for (size_t i = 0; i < n; ++i) {
        len[i] = 100.0 + static_cast<double>(i);
        y[i] = 10.0;
        uniform_pred[i] = y[i] + ((i % 2 == 0) ? 0.5 : -0.5);
        prop_pred[i] = y[i] + len[i] / 1000.0;
    }
    const auto eq = length_binned_errors(len, y, uniform_pred);
    for (const auto& b : eq.bins) CHECK(b.mae == doctest::Approx(0.5));
    const auto inc = length_binned_errors(len, y, prop_pred);
    for (size_t i = 1; i < inc.bins.size(); ++i) CHECK(inc.bins[i].mae > inc.bins[i - 1].mae);
}

TEST_CASE("tail errors") {
    std::vector<double> y{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> yh{2, 3, 4, 5, 6, 7, 8, 9};
    // cutoff below the minimum reproduces the global report
    const auto whole = tail_errors(y, yh, 0.0);
    CHECK(whole.mae == doctest::Approx(mae(y, yh)));
    CHECK(whole.n == 8);
    // cutoff above the maximum is an empty tail
    CHECK_THROWS_AS(tail_errors(y, yh, 100.0), EmptyTail);
    // filtered recomputation
    const auto tail = tail_errors(y, yh, 5.0);
    const std::vector<double> ty{5, 6, 7, 8}, th{6, 7, 8, 9};
    CHECK(tail.n == 4);
    CHECK(tail.mae == doctest::Approx(testsupport::naive_mae(ty, th)));
    CHECK(tail.mape == doctest::Approx(testsupport::naive_mape(ty, th)));
}

TEST_CASE("quantile rule: linear interpolation between order statistics") {
    std::vector<double> v;
    for (int i = 0; i <= 100; ++i) v.push_back(static_cast<double>(i));
    CHECK(quantile(v, 50.0) == doctest::Approx(50.0));
    CHECK(quantile(v, 99.0) == doctest::Approx(99.0));

    const std::vector<double> pair{0.0, 1.0};
    CHECK(quantile(pair, 50.0) == doctest::Approx(0.5));
    CHECK(quantile(pair, 75.0) == doctest::Approx(0.75));

    const std::vector<double> flat{3.0, 3.0, 3.0};
    for (double p : {1.0, 50.0, 99.0, 99.9}) CHECK(quantile(flat, p) == 3.0);

    CHECK_THROWS_AS(quantile(std::vector<double>{}, 50.0), EmptyInput);
}

TEST_CASE("error percentiles use the shared quantile rule") {
    Rng rng(8);
    const size_t n = 500;
    std::vector<double> y(n), yh(n), abs_err(n);
    for (size_t i = 0; i < n; ++i) {
        y[i] = rng.uniform(0.0, 10.0);
        yh[i] = y[i] + rng.uniform(-3.0, 3.0);
        abs_err[i] = std::fabs(y[i] - yh[i]);
    }
    const auto p = error_percentiles(y, yh);
    CHECK(p.p50 == doctest::Approx(quantile(abs_err, 50.0)));
    CHECK(p.p90 == doctest::Approx(quantile(abs_err, 90.0)));
    CHECK(p.p95 == doctest::Approx(quantile(abs_err, 95.0)));
    CHECK(p.p99 == doctest::Approx(quantile(abs_err, 99.0)));
}
