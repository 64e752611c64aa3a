#include <cmath>
#include <random>

#include "doctest.h"
#include "ultraweight/conditions.hpp"

using namespace ultraweight;

namespace {

const WeightSequence& gevrey(double s) {
    static std::map<double, WeightSequence> cache;
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, make_family("gevrey", {{"s", s}}, 512)).first;
    return it->second;
}

WeightSequence qgevrey() { return make_family("q_gevrey", {{"q", 2}, {"n", 2}}, 512); }

}  // namespace

TEST_CASE("mg battery agrees on known sequences") {
    const auto g = mg_battery(gevrey(1));
    CHECK(g.size() == 7);
    for (const auto& [k, r] : g) CHECK_MESSAGE(r.holds(), k);

    const auto q = mg_battery(qgevrey());
    for (const auto& [k, r] : q)
        if (k != "mg_coincide") CHECK_MESSAGE(q.at(k).fails(), k);
    CHECK(q.at("mg_coincide").holds());

    CHECK_THROWS_AS(mg_battery(WeightSequence("x", {0, 2, 3, 4, 5})), InvalidInput);
}

TEST_CASE("mg item ii constant matches a brute-force sup") {
    // M_{2p} <= C^{2p} M_p^2: the optimal log C is max_p (L_{2p} - 2 L_p) / (2p)
    const auto& m = gevrey(1.5);
    const auto r = mg_battery(m).at("mg_ii");
    REQUIRE_FALSE(r.witness_series.empty());
    const auto& last = r.witness_series.back();
    double brute = 0;
    for (std::size_t p = 1; p <= static_cast<std::size_t>(last.prefix); ++p)
        brute = std::max(brute, (m[2 * p] - 2 * m[p]) / (2.0 * p));
    CHECK(last.value == doctest::Approx(brute).epsilon(1e-12));
    CHECK(brute < 1.5 * std::log(2.0) + 1e-12);
}

TEST_CASE("growth flags") {
    auto g1 = growth_flags(gevrey(1));
    CHECK(g1.at("dc").holds());
    CHECK(g1.at("mualmost").holds());
    CHECK(g1.at("quasianalytic").holds());  // sum 1/p diverges
    auto g2 = growth_flags(gevrey(2));
    CHECK(g2.at("quasianalytic").fails());
    auto d = growth_flags(make_family("double_exp", {}, 512));
    CHECK(d.at("dc").fails());
    CHECK(d.at("mualmost").fails());
    CHECK(d.at("quasianalytic").fails());
}

TEST_CASE("liminf ratio is exact for power quotients") {
    for (double s : {0.5, 1.0, 2.0, 3.5}) {
        CHECK(liminf_ratio_estimate(gevrey(s), 2) == doctest::Approx(s * std::log(2.0)).epsilon(1e-12));
        CHECK(liminf_ratio_estimate(gevrey(s), 3) == doctest::Approx(s * std::log(3.0)).epsilon(1e-12));
    }
    // q-gevrey: log mu_{2p} - log mu_p = (3 p^2 + ... ) log 2 grows
    CHECK(liminf_ratio_estimate(qgevrey(), 2) > 100);
}

TEST_CASE("beta and gamma conditions") {
    auto b1 = beta_gamma(gevrey(1), 2, 1);
    CHECK(b1.at("beta1").fails());  // boundary: mu_{2p} = 2 mu_p exactly
    CHECK(b1.at("beta3").holds());
    CHECK(b1.at("gamma1").fails());
    auto b2 = beta_gamma(gevrey(2), 2, 1);
    CHECK(b2.at("beta1").holds());
    CHECK(b2.at("condv").holds());
    CHECK(b2.at("gamma1").holds());
    CHECK(beta_gamma(gevrey(2), 2, 2).at("condv").fails());  // boundary again

    // gamma1 constant: sup_p (mu_p / p) sum_{p <= k <= P} 1/mu_k for mu_p = p^2
    double brute = 0;
    for (std::size_t p = 1; p <= 512; ++p) {
        double tail = 0;
        for (std::size_t k = p; k <= 512; ++k) tail += 1.0 / (double(k) * k);
        brute = std::max(brute, double(p) * tail);
    }
    CHECK(std::exp(b2.at("gamma1").constants.at("log_C")) <= brute * (1 + 1e-9));
    CHECK(std::exp(b2.at("gamma1").constants.at("log_C")) < 2);
}

TEST_CASE("moderate growth index") {
    CHECK(moderate_growth_index(gevrey(1), 8).constants.at("g") == 1);
    CHECK(moderate_growth_index(qgevrey(), 8).constants.at("g") == 2);
    CHECK(moderate_growth_index(make_family("q_gevrey", {{"q", 3}, {"n", 3}}, 512), 8).constants.at("g") == 2);
    const auto r = moderate_growth_index(gevrey(1), 4);
    CHECK(r.sub_reports.size() == 4);
    // d = 1 oracle on p <= P / d_max
    double brute = -INFINITY;
    const auto& m = gevrey(1);
    for (std::size_t p = 1; p <= 128; ++p) brute = std::max(brute, m.log_quotient(p) - m[p] / p);
    CHECK(r.sub_reports.at("d=1").witness_series.back().value == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("mixed pairs") {
    for (auto level : {MgLevel::I, MgLevel::II, MgLevel::III, MgLevel::IV, MgLevel::V}) {
        CHECK_MESSAGE(mixed_mg_pair(gevrey(1), gevrey(2), level).holds(), to_string(level));
        CHECK_MESSAGE(mixed_mg_pair(qgevrey(), qgevrey(), level).fails(), to_string(level));
    }
    // a larger rhs can only help
    CHECK(mixed_mg_pair(gevrey(2), gevrey(3), MgLevel::II).holds());
    CHECK(mixed_mg_pair(gevrey(4), gevrey(1), MgLevel::II).fails());
    CHECK(mg_level_from_string("IV") == MgLevel::IV);
    CHECK(matrix_variant_from_string(to_string(MatrixVariant::B)) == MatrixVariant::B);
    CHECK_THROWS_AS(mg_level_from_string("VI"), InvalidInput);
}

TEST_CASE("matrix levels on the gevrey matrix") {
    const auto mat = build_associated_matrix(WeightFunctionHandle::associated(gevrey(1)), dyadic_grid(), 512);
    for (auto v : {MatrixVariant::R, MatrixVariant::B})
        for (auto level : {MgLevel::I, MgLevel::II, MgLevel::IV})
            CHECK_MESSAGE(matrix_mg(mat, v, level).holds(), to_string(v) << " " << to_string(level));
    CHECK(quotient_root_comparison(mat, MatrixVariant::R).holds());
}

TEST_CASE("matrix levels fail for a constant q-gevrey matrix") {
    const WeightMatrix mat({{1, qgevrey(), false}, {2, qgevrey(), false}}, MatrixOrigin::FromSequence);
    CHECK(matrix_mg(mat, MatrixVariant::R, MgLevel::II).fails());
    CHECK(matrix_mg(mat, MatrixVariant::B, MgLevel::I).fails());
}

TEST_CASE("equlemma, admissibility and condv propagation") {
    CHECK(equlemma_check(gevrey(1), 2).holds());
    CHECK(equlemma_check(gevrey(1), 2, false).sub_reports.empty());

    const auto adm = admissibility_bundle(gevrey(2));
    CHECK(adm.holds());
    CHECK(adm.sub_reports.size() == 4);
    const auto adm1 = admissibility_bundle(gevrey(1));
    CHECK(adm1.fails());
    CHECK(adm1.sub_reports.at("beta1").fails());
    CHECK(adm1.sub_reports.at("genmg").holds());

    const auto mat = build_associated_matrix(WeightFunctionHandle::associated(gevrey(2)), dyadic_grid(), 512);
    const auto cv = condv_propagation(mat, 1, 2, 2, 1);
    CHECK(cv.sub_reports.at("identity").holds());
    CHECK(cv.sub_reports.at("identity").constants.at("max_relative_error") < 1e-10);
    CHECK(cv.sub_reports.at("base").holds());
    CHECK_THROWS_AS(condv_propagation(mat, 3, 2, 2, 1), InvalidInput);
}
