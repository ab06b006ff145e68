#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "obfscore/rng.hpp"
#include "obfscore/tape.hpp"

using namespace obfscore;

namespace {

Tensor random_tensor(int r, int c, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(r, c);
    for (size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

// Finite-difference check of a scalar-valued tape program against the
// analytic gradients of its leaf inputs.
void check_program(const std::function<Tape::Id(Tape&, const std::vector<Tape::Id>&)>& build,
                   std::vector<Tensor> inputs, double h = 1e-6, double tol = 1e-5) {
    auto eval = [&](const std::vector<Tensor>& xs) {
        Tape tape(false);
        std::vector<Tape::Id> ids;
        ids.reserve(xs.size());
        for (const auto& x : xs) ids.push_back(tape.leaf(x));
        return tape.value(build(tape, ids))[0];
    };

    Tape tape(true);
    std::vector<Tape::Id> ids;
    for (const auto& x : inputs) ids.push_back(tape.leaf(x));
    const Tape::Id root = build(tape, ids);
    REQUIRE(tape.value(root).size() == 1);
    tape.backward(root);

    for (size_t t = 0; t < inputs.size(); ++t) {
        const Tensor& analytic = tape.grad(ids[t]);
        for (size_t e = 0; e < inputs[t].size(); ++e) {
            auto perturbed = inputs;
            perturbed[t][e] += h;
            const double up = eval(perturbed);
            perturbed[t][e] -= 2.0 * h;
            const double down = eval(perturbed);
            const double fd = (up - down) / (2.0 * h);
            const double an = analytic.empty() ? 0.0 : analytic[e];
            CHECK(std::fabs(an - fd) < tol * std::max({1.0, std::fabs(an), std::fabs(fd)}));
        }
    }
}

}  // namespace

TEST_CASE("matmul gradients") {
    Rng rng(1);
    check_program(
        [](Tape& t, const std::vector<Tape::Id>& in) {
            return t.sq_sum(t.matmul(in[0], in[1]));
        },
        {random_tensor(3, 4, rng), random_tensor(4, 2, rng)});
}

TEST_CASE("matmul_nt gradients") {
    Rng rng(2);
    check_program(
        [](Tape& t, const std::vector<Tape::Id>& in) {
            return t.sq_sum(t.matmul_nt(in[0], in[1]));
        },
        {random_tensor(3, 4, rng), random_tensor(5, 4, rng)});
}

TEST_CASE("add sub scale add_rowvec gradients") {
    Rng rng(3);
    check_program(
        [](Tape& t, const std::vector<Tape::Id>& in) {
            const auto a = t.add(in[0], in[1]);
            const auto b = t.sub(a, in[0]);
            const auto c = t.scale(b, 1.7);
            return t.sq_sum(t.add_rowvec(c, in[2]));
        },
        {random_tensor(4, 3, rng), random_tensor(4, 3, rng), random_tensor(1, 3, rng)});
}

TEST_CASE("slice and concat gradients") {
    Rng rng(4);
    check_program(
        [](Tape& t, const std::vector<Tape::Id>& in) {
            const auto left = t.slice_cols(in[0], 0, 2);
            const auto right = t.slice_cols(in[0], 2, 5);
            const std::array<Tape::Id, 2> both{right, left};
            const auto swapped = t.concat_cols(both);
            const std::array<Tape::Id, 2> rows{swapped, in[1]};
            const auto stacked = t.concat_rows(rows);
            const auto top = t.slice_rows(stacked, 0, 3);
            return t.sq_sum(top);
        },
        {random_tensor(2, 5, rng), random_tensor(2, 5, rng)});
}

TEST_CASE("mean and masked mean gradients") {
    Rng rng(5);
    check_program(
        [](Tape& t, const std::vector<Tape::Id>& in) {
            const auto m = t.mean_rows(in[0]);
            const auto mm = t.masked_mean_rows(in[1], {1.0, 0.0, 1.0, 0.0}, 1e-8);
            return t.sq_sum(t.add(m, mm));
        },
        {random_tensor(3, 4, rng), random_tensor(4, 4, rng)});
}

TEST_CASE("masked mean matches a naive loop and honours the mask") {
    Rng rng(6);
    const Tensor x = random_tensor(5, 3, rng);
    const std::vector<double> mask{1.0, 0.0, 1.0, 1.0, 0.0};
    Tape tape(false);
    const auto out = tape.value(tape.masked_mean_rows(tape.leaf(x), mask, 1e-8));
    double denom = 1e-8;
    for (double m : mask) denom += m;
    for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int r = 0; r < 5; ++r) s += mask[static_cast<size_t>(r)] * x(r, c);
        CHECK(out(0, c) == doctest::Approx(s / denom).epsilon(1e-12));
    }

    Tape t2(false);
    CHECK_THROWS(t2.masked_mean_rows(t2.leaf(x), {0, 0, 0, 0, 0}, 1e-8));
}

TEST_CASE("layernorm gradients") {
    Rng rng(7);
    check_program(
        [](Tape& t, const std::vector<Tape::Id>& in) {
            return t.sq_sum(t.layernorm(in[0], in[1], in[2]));
        },
        {random_tensor(4, 6, rng), random_tensor(1, 6, rng, 0.5, 1.5),
         random_tensor(1, 6, rng)},
        1e-6, 1e-4);
}

TEST_CASE("softmax rows: normalization and gradients") {
    Rng rng(8);
    const Tensor logits = random_tensor(6, 9, rng, -3.0, 3.0);
    Tape tape(false);
    const Tensor probs = tape.value(tape.softmax_rows(tape.leaf(logits)));
    for (int r = 0; r < probs.rows(); ++r) {
        double s = 0.0;
        for (int c = 0; c < probs.cols(); ++c) {
            s += probs(r, c);
            CHECK(probs(r, c) >= 0.0);
        }
        CHECK(std::fabs(s - 1.0) < 1e-12);
    }

    check_program(
        [](Tape& t, const std::vector<Tape::Id>& in) {
            const auto p = t.softmax_rows(in[0]);
            return t.sq_sum(t.matmul(p, in[1]));
        },
        {random_tensor(3, 4, rng, -2.0, 2.0), random_tensor(4, 2, rng)});
}

TEST_CASE("gelu and embedding gradients") {
    Rng rng(9);
    check_program(
        [](Tape& t, const std::vector<Tape::Id>& in) {
            const auto e = t.embedding_rows(in[0], {0, 2, 2, 1});
            return t.sq_sum(t.gelu_op(e));
        },
        {random_tensor(4, 3, rng, -2.0, 2.0)});
}

TEST_CASE("zscore_sum value and gradient") {
    Rng rng(10);
    const std::vector<double> mu{0.5, -1.0, 2.0};
    const std::vector<double> inv_sigma{2.0, 1.0, 0.25};
    check_program(
        [&](Tape& t, const std::vector<Tape::Id>& in) {
            return t.zscore_sum(in[0], mu, inv_sigma);
        },
        {random_tensor(1, 3, rng)});

    Tape tape(false);
    Tensor f(1, 3);
    f[0] = 1.5;
    f[1] = 0.0;
    f[2] = 6.0;
    const double got = tape.value(tape.zscore_sum(tape.leaf(f), mu, inv_sigma))[0];
    CHECK(got == doctest::Approx((1.5 - 0.5) * 2.0 + (0.0 + 1.0) * 1.0 + (6.0 - 2.0) * 0.25));
}

TEST_CASE("dropout-style mask gradient") {
    Rng rng(11);
    Tensor mask(3, 3);
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = (i % 2 == 0) ? 2.0 : 0.0;
    check_program(
        [&](Tape& t, const std::vector<Tape::Id>& in) {
            return t.sq_sum(t.hadamard_const(in[0], mask));
        },
        {random_tensor(3, 3, rng)});
}

TEST_CASE("gradients accumulate across shared subexpressions") {
    Rng rng(12);
    check_program(
        [](Tape& t, const std::vector<Tape::Id>& in) {
            const auto shared = t.matmul(in[0], in[1]);
            const auto a = t.sq_sum(shared);
            const auto b = t.sq_sum(t.scale(shared, 0.5));
            return t.add(a, b);
        },
        {random_tensor(2, 3, rng), random_tensor(3, 2, rng)});
}
