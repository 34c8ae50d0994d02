#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "medmark/errors.hpp"
#include "medmark/stats.hpp"
#include "oracles.hpp"

using namespace medmark;

namespace {

PairedOutcomes bc(std::uint64_t b, std::uint64_t c) {
    PairedOutcomes po;
    po.n01 = b;
    po.n10 = c;
    po.n11 = 10;  // concordant counts never enter the test
    return po;
}

}  // namespace

TEST_CASE("balanced discordant pairs are maximally insignificant") {
    const McNemarResult r = mcnemar(bc(5, 5));
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("b=10 c=2 lands at the frozen oracle value") {
    const McNemarResult r = mcnemar(bc(10, 2));
    CHECK(r.statistic == doctest::Approx(49.0 / 12.0).epsilon(1e-12));
    CHECK(std::abs(r.p_value - 0.04330814281079198) <= 1e-12);
    CHECK(std::abs(r.p_value - 0.0433) <= 1e-4);
    CHECK(r.p_value < 0.05);
}

TEST_CASE("exact binomial branch matches hand enumeration") {
    const McNemarResult r = mcnemar(bc(3, 0), McNemarMethod::Exact);
    CHECK(r.p_value == doctest::Approx(0.25).epsilon(1e-12));

    // every table with b+c <= 12 against the integer-enumeration oracle
    for (std::uint64_t n = 1; n <= 12; ++n) {
        for (std::uint64_t b = 0; b <= n; ++b) {
            const std::uint64_t c = n - b;
            const McNemarResult got = mcnemar(bc(b, c), McNemarMethod::Exact);
            const double want = oracles::binomial_two_sided_exact(b < c ? b : c, n);
            CHECK(std::abs(got.p_value - want) <= 1e-12);
        }
    }
}

TEST_CASE("no discordant pairs is a degenerate input") {
    CHECK_THROWS_AS(mcnemar(bc(0, 0)), ArgumentError);
}

TEST_CASE("two-sided symmetry under swapping b and c") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const auto b = static_cast<std::uint64_t>(oracles::uniform01(rng) * 40);
        const auto c = static_cast<std::uint64_t>(oracles::uniform01(rng) * 40);
        if (b + c == 0) continue;
        for (const auto method : {McNemarMethod::Chi2CC, McNemarMethod::Exact}) {
            const McNemarResult x = mcnemar(bc(b, c), method);
            const McNemarResult y = mcnemar(bc(c, b), method);
            CHECK(x.p_value == y.p_value);
            CHECK(x.statistic == y.statistic);
        }
    }
}

TEST_CASE("p-values stay in [0,1] and decrease in |b-c| for fixed b+c") {
    for (const std::uint64_t total : {std::uint64_t{6}, std::uint64_t{25}, std::uint64_t{80}}) {
        double prev = 2.0;
        for (std::uint64_t b = (total + 1) / 2; b <= total; ++b) {
            const McNemarResult r = mcnemar(bc(b, total - b));
            CHECK(r.p_value >= 0.0);
            CHECK(r.p_value <= 1.0);
            CHECK(r.p_value <= prev + 1e-15);
            prev = r.p_value;
        }
    }
}

TEST_CASE("chi-square p matches the incomplete-gamma oracle") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto b = static_cast<std::uint64_t>(oracles::uniform01(rng) * 200);
        const auto c = static_cast<std::uint64_t>(oracles::uniform01(rng) * 200);
        if (b + c == 0) continue;
        const McNemarResult r = mcnemar(bc(b, c));
        CHECK(std::abs(r.p_value - oracles::chi2_1_sf(r.statistic)) <= 1e-9);
    }
}

TEST_CASE("chi-square and exact variants agree for b+c >= 25") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const auto total = 25 + static_cast<std::uint64_t>(oracles::uniform01(rng) * 30);
        const auto b = static_cast<std::uint64_t>(oracles::uniform01(rng) * (total + 1));
        const McNemarResult chi = mcnemar(bc(b, total - b), McNemarMethod::Chi2CC);
        const McNemarResult exact = mcnemar(bc(b, total - b), McNemarMethod::Exact);
        CHECK(std::abs(chi.p_value - exact.p_value) <= 0.02);
    }
}

TEST_CASE("auto method selects by discordant count") {
    CHECK(mcnemar(bc(10, 2), McNemarMethod::Auto).method_used == McNemarMethod::Exact);
    CHECK(mcnemar(bc(20, 10), McNemarMethod::Auto).method_used == McNemarMethod::Chi2CC);
}

TEST_CASE("paired outcomes tally") {
    const PairedOutcomes same = paired_outcomes({1, 0, 1}, {1, 0, 0}, {1, 0, 0});
    CHECK(same.b() == 0);
    CHECK(same.c() == 0);
    CHECK(same.n11 == 2);
    CHECK(same.n00 == 1);

    const PairedOutcomes swapped = paired_outcomes({1, 1}, {0, 0}, {1, 1});
    CHECK(swapped.b() == 2);
    CHECK(swapped.c() == 0);

    // four-item mixed case, hand-tallied
    const PairedOutcomes mixed = paired_outcomes({1, 0, 1, 0}, {1, 1, 0, 0}, {0, 0, 1, 0});
    CHECK(mixed.n11 == 1);  // item 3: both right
    CHECK(mixed.b() == 2);  // items 1 and 2: A wrong, B right
    CHECK(mixed.c() == 1);  // item 0: A right, B wrong
    CHECK(mixed.n00 == 0);
    CHECK(mixed.total() == 4);
}

TEST_CASE("paired outcomes input validation") {
    CHECK_THROWS_AS(paired_outcomes({}, {}, {}), ArgumentError);
    CHECK_THROWS_AS(paired_outcomes({1, 0}, {1}, {0, 1}), ArgumentError);
    CHECK_THROWS_AS(paired_outcomes({1, 2}, {1, 0}, {0, 1}), ArgumentError);
    CHECK_THROWS_AS(paired_outcomes({1, 0}, {1, -1}, {0, 1}), ArgumentError);
}

TEST_CASE("zero-normalized deltas") {
    CHECK(zero_normalized_deltas(0.85, {0.85}) == std::vector<double>{0.0});

    const auto deltas = zero_normalized_deltas(0.85, {0.87, 0.84});
    CHECK(deltas[0] == doctest::Approx(0.02));
    CHECK(deltas[1] == doctest::Approx(-0.01));

    CHECK(zero_normalized_deltas(0.5, {}).empty());
    CHECK_THROWS_AS(zero_normalized_deltas(1.5, {0.5}), ArgumentError);
    CHECK_THROWS_AS(zero_normalized_deltas(0.5, {1.5}), ArgumentError);
}
