#include <cmath>

#include "doctest.h"
#include "ultraweight/conditions.hpp"
#include "ultraweight/counterexample.hpp"

using namespace ultraweight;

TEST_CASE("minimal schedule against hand-computed values") {
    const auto s = build_schedule(8, {}, 1.0);
    // a_{j+1} = j (a_j + 1) with equality
    CHECK(s.breakpoints == std::vector<std::uint64_t>{0, 1, 4, 15, 64, 325, 1956, 13699});
    CHECK(s.tail_breakpoint == 8 * 13700);
    // b_2 = max(2, (f(1) + 4 * 2) / 1), b_3 = max(10, (28 + 9 * 5) / 4), ...
    REQUIRE(s.slopes.size() == 7);
    CHECK(s.slopes[0] == 1);
    CHECK(s.slopes[1] == 9);
    CHECK(s.slopes[2] == doctest::Approx(18.25));
    CHECK(s.slopes[3] == doctest::Approx((228.75 + 16 * 16) / 15.0));
    CHECK(s.f_values[3] == doctest::Approx(228.75));
    CHECK(validate_schedule(s).holds());
}

TEST_CASE("schedules validate for every variant") {
    for (const auto& names : std::vector<std::vector<std::string>>{
             {"minimal"}, {"quasianalytic"}, {"strong_b"}, {"quasianalytic", "strong_b"}}) {
        const auto v = CounterexampleVariant::from_names(names);
        const auto s = build_schedule(6, v, 2.0);
        CHECK(validate_schedule(s).holds());
        for (std::size_t j = 1; j < s.levels(); ++j) {
            CHECK(s.breakpoints[j] >= j * (s.breakpoints[j - 1] + 1));
            if (j >= 2) CHECK(s.slopes[j - 1] >= s.slopes[j - 2] + 1);
            if (v.quasianalytic)
                CHECK(static_cast<double>(s.breakpoints[j]) >=
                      s.slopes[j - 1] / static_cast<double>(j) - static_cast<double>(s.breakpoints[j - 1]));
        }
    }
    CHECK_THROWS_AS(CounterexampleVariant::from_names({"weird"}), InvalidInput);
    CHECK_THROWS_AS(build_schedule(3, {}, 1.0), InvalidInput);
    CHECK_THROWS_AS(build_schedule(6, {}, 0.0), InvalidInput);
}

TEST_CASE("validate_schedule reports the first broken constraint") {
    auto s = build_schedule(6, {}, 1.0);
    auto bad = s;
    bad.slopes[2] = bad.slopes[1];
    auto r = validate_schedule(bad);
    CHECK(r.fails());
    CHECK(r.witness_index == 3);

    bad = s;
    bad.breakpoints[3] -= 1;
    r = validate_schedule(bad);
    CHECK(r.fails());
    CHECK(r.witness_index == 3);

    bad = s;
    bad.slopes[3] = bad.slopes[2] + 1;  // increasing but below the b-constraint
    r = validate_schedule(bad);
    CHECK(r.fails());
    CHECK(r.witness_index == 4);
}

TEST_CASE("the sequence is the piecewise linear interpolant") {
    const auto [s, n] = build_counterexample(6, {}, 1.0);
    CHECK(n.horizon() == s.tail_breakpoint);
    CHECK(n.is_log_convex());
    CHECK(validate_lc(n).holds());
    for (std::size_t j = 0; j < s.levels(); ++j) CHECK(n[s.breakpoints[j]] == doctest::Approx(s.f_values[j]));
    for (std::uint64_t p = 0; p <= n.horizon(); p += 7) CHECK(n[p] == doctest::Approx(s.f(p)));
    // quotients are the slopes
    for (std::size_t j = 0; j + 1 < s.levels(); ++j)
        CHECK(n.log_quotient(s.breakpoints[j] + 1) == doctest::Approx(s.slopes[j]));
    std::vector<std::size_t> cps;
    for (auto a : s.breakpoints) cps.push_back(a + 1);
    CHECK(n.checkpoints() == cps);
    CHECK_THROWS_AS(s.f(s.tail_breakpoint + 1), RangeError);
}

TEST_CASE("witness divergence grows without bound") {
    const auto [s, n] = build_counterexample(8, {}, 1.0);
    for (std::size_t d = 2; d <= 7; ++d) {
        const auto w = witness_divergence(s, n, d);
        CHECK(w.size() == 8 - d);
        for (std::size_t i = 0; i < w.size(); ++i) {
            // independent recomputation from the schedule alone
            const std::uint64_t p = s.breakpoints[d + i - 1] + 1;
            const double nu = s.f(p) - s.f(p - 1);
            CHECK(w[i] == doctest::Approx(nu - s.f(d * p) / static_cast<double>(d * p)).epsilon(1e-12));
            if (i > 0) CHECK(w[i] > w[i - 1] + 1);
        }
    }
    CHECK_THROWS_AS(witness_divergence(s, n, 8), RangeError);
    CHECK_THROWS_AS(witness_divergence(s, n, 1), InvalidInput);
}

TEST_CASE("no moderate growth index while the schedule stays valid") {
    const auto [s, n] = build_counterexample(7, {}, 1.0);
    const auto g = moderate_growth_index(n, 4);
    CHECK(std::isinf(g.constants.at("g")));
    CHECK(mg_battery(n).at("mg_i").fails());
}

TEST_CASE("block sums") {
    const auto s = build_schedule(6, CounterexampleVariant::from_names({"quasianalytic"}), 1.0);
    const auto n = counterexample_sequence(s);
    const auto b = quasianalytic_block_sums(s);
    double recip = 0;
    for (std::uint64_t p = 1; p <= s.breakpoints.back(); ++p) recip += std::exp(-n.log_quotient(p));
    CHECK(b.reciprocal == doctest::Approx(recip).epsilon(1e-12));
    CHECK(b.harmonic == doctest::Approx(1 + 0.5 + 1.0 / 3 + 0.25 + 0.2));
    double disp = 0;
    for (std::size_t j = 1; j < s.levels(); ++j)
        disp += static_cast<double>(s.breakpoints[j] - s.breakpoints[j - 1]) / s.slopes[j - 1];
    CHECK(b.displayed == doctest::Approx(disp));
}

TEST_CASE("horizon cap and json round trip") {
    const auto s = build_schedule(10, {}, 1.0);
    const auto n = counterexample_sequence(s);
    CHECK(s.tail_breakpoint > kMaxCounterexampleHorizon);
    CHECK(n.horizon() == kMaxCounterexampleHorizon);
    CHECK(n.label().find("cut at") != std::string::npos);

    const auto small = build_schedule(6, CounterexampleVariant::from_names({"strong_b"}), 1.0);
    const auto back = schedule_from_json(to_json(small));
    CHECK(back.breakpoints == small.breakpoints);
    CHECK(back.slopes == small.slopes);
    CHECK(back.tail_breakpoint == small.tail_breakpoint);
    CHECK(back.variant.strong_b);
    CHECK(validate_schedule(back).holds());

    auto j = to_json(small);
    j.erase("f_values");
    const auto recomputed = schedule_from_json(j);
    for (std::size_t k = 0; k < small.levels(); ++k)
        CHECK(recomputed.f_values[k] == doctest::Approx(small.f_values[k]));
    CHECK_THROWS_AS(schedule_from_json(nlohmann::json::parse(R"({"slopes":[1]})")), InvalidInput);
    CHECK_THROWS_AS(schedule_from_json(nlohmann::json::parse(R"({"breakpoints":[0,1],"slopes":[]})")),
                    InvalidInput);
}
