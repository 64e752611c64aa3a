// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ultraweight/analysis.hpp"
#include "ultraweight/assoc.hpp"
#include "ultraweight/conditions.hpp"
#include "ultraweight/counterexample.hpp"
#include "ultraweight/matrix.hpp"
#include "ultraweight/sequence.hpp"

using namespace ultraweight;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            if (ok) detail.clear();
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

struct Battery {
    std::vector<WeightSequence> seqs;
    PiecewiseLinearLogSpec schedule;
};

Battery battery() {
    Battery b;
    b.seqs.push_back(make_family("gevrey", {{"s", 1}}, 512));
    b.seqs.push_back(make_family("gevrey", {{"s", 2}}, 512));
    b.seqs.push_back(make_family("q_gevrey", {{"q", 2}, {"n", 2}}, 512));
    b.seqs.push_back(make_family("q_gevrey", {{"q", 3}, {"n", 3}}, 512));
    b.seqs.push_back(make_family("double_exp", {}, 512));
    auto [spec, n] = build_counterexample(8, {}, 1.0);
    b.schedule = spec;
    b.seqs.push_back(n);
    return b;
}

const WeightSequence& counterexample(const Battery& b) { return b.seqs.back(); }

// --- criteria ---------------------------------------------------------------

Outcome exact_identities(const Battery& b) {
    Outcome o;
    double worst_int = 0, worst_rec = 0, worst_mat = 0;
    for (const auto& m : b.seqs) {
        const AssociatedFunction a(m);
        // t = exp(u) rounds; keep the last sample inside the exact range
        const double umax = std::min(a.log_range(), 700.0) * (1 - 1e-12);
        for (int k = 0; k < 100; ++k) {
            const double t = std::exp(umax * k / 99.0);
            const double lhs = omega_eval(a, t), rhs = omega_integral_form(a, t);
            worst_int = std::max(worst_int, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
        bool exact = true;
        for (std::size_t p = 0; p <= m.horizon(); ++p) exact = exact && young_conjugate(a, static_cast<double>(p)) == m[p];
        o.require(exact, "conjugate not exact at integers for " + m.label());
        for (std::size_t p = 1; p <= std::min<std::size_t>(128, m.horizon() / 2); ++p)
            worst_rec = std::max(worst_rec, rel_err(reconstruct_sequence(a, p), m[p]));
        const auto mat = build_associated_matrix(WeightFunctionHandle::associated(m), {1, 2, 3, 4}, m.horizon());
        for (double l : {1.0, 2.0, 3.0, 4.0}) {
            const auto& w = mat.member(l).seq;
            const std::size_t li = static_cast<std::size_t>(l);
            for (std::size_t p = 1; p <= w.horizon(); ++p)
                worst_mat = std::max(worst_mat, rel_err(w[p], m[li * p] / l));
        }
    }
    o.require(worst_int <= 1e-9, "integral form error " + sci(worst_int));
    o.require(worst_rec <= 1e-9, "reconstruction error " + sci(worst_rec));
    o.require(worst_mat <= 1e-10, "matrix identity error " + sci(worst_mat));
    if (o.ok)
        o.detail = "integral " + sci(worst_int) + ", reconstruct " + sci(worst_rec) + ", matrix " + sci(worst_mat);
    return o;
}

Outcome conjugate_oracle(const Battery& b) {
    Outcome o;
    double worst = 0;
    for (const auto& m : b.seqs) {
        const auto h = WeightFunctionHandle::associated(m);
        const double P = static_cast<double>(m.horizon());
        for (int k = 0; k < 50; ++k) {
            const double x = std::floor(P * (k + 0.5) / 50.0) + 0.3 + 0.4 * (k % 2);
            worst = std::max(worst, rel_err(young_conjugate(h.assoc(), x), young_conjugate_oracle(h, x)));
        }
    }
    o.require(worst <= 1e-6, "battery oracle error " + sci(worst));

    const auto w2 = WeightFunctionHandle::omega_s(2.0);
    double worst2 = 0;
    for (double x : {0.25, 1.0, 3.7, 10.0, 42.5, 100.0, 333.3}) {
        worst2 = std::max(worst2, rel_err(w2.conjugate(x), x * x / 4));
        worst2 = std::max(worst2, rel_err(young_conjugate_oracle(w2, x), x * x / 4));
    }
    o.require(worst2 <= 1e-6, "omega_2 conjugate error " + sci(worst2));

    double worst_q = 0;
    const auto mat = build_associated_matrix(w2, dyadic_grid(), 512);
    for (const auto& mem : mat.members()) {
        const auto q = make_family("q_gevrey", {{"q", std::exp(mem.index / 4)}, {"n", 2}}, mem.seq.horizon());
        for (std::size_t p = 0; p <= mem.seq.horizon(); ++p) worst_q = std::max(worst_q, rel_err(mem.seq[p], q[p]));
    }
    o.require(worst_q <= 1e-9, "omega_2 members vs q-Gevrey " + sci(worst_q));
    if (o.ok) o.detail = "oracle " + sci(worst) + ", x^2/4 " + sci(worst2) + ", q-Gevrey members " + sci(worst_q);
    return o;
}

Outcome matrix_inequalities(const Battery& b) {
    Outcome o;
    std::vector<WeightFunctionHandle> weights;
    for (const auto& m : b.seqs) weights.push_back(WeightFunctionHandle::associated(m));
    weights.push_back(WeightFunctionHandle::omega_s(2.0));
    for (const auto& w : weights) {
        const std::size_t P = w.is_associated() ? w.assoc().horizon() : 512;
        const auto mat = build_associated_matrix(w, dyadic_grid(), P);
        const auto mixed = mixed_mg_check(mat, 64);
        o.require(mixed.holds(), "mixed mg fails for " + w.label());
        const auto sandwich = omega_sandwich_check(mat);
        bool finite = sandwich.holds();
        for (const auto& [k, sub] : sandwich.sub_reports)
            for (const auto& [c, v] : sub.constants) finite = finite && std::isfinite(v);
        o.require(finite, "sandwich fails for " + w.label());
        o.require(shifted_quotient_check(mat, 64).holds(), "shifted quotients fail for " + w.label());
    }
    if (o.ok) o.detail = std::to_string(weights.size()) + " from-omega matrices";
    return o;
}

bool strictly_increasing(const std::vector<SeriesPoint>& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i].value > s[i - 1].value)) return false;
    return s.size() >= 2;
}

Outcome mg_coincidence(const Battery& b) {
    Outcome o;
    for (const auto& m : b.seqs) {
        auto r = mg_battery(m);
        o.require(r["mg_coincide"].holds(), "items disagree for " + m.label());
    }
    auto g = mg_battery(b.seqs[0]);
    o.require(g["mg_i"].holds() && std::exp(g["mg_i"].constants["log_C"]) <= 2,
              "gevrey(1) item (i) constant " + format_real(std::exp(g["mg_i"].constants["log_C"])));
    for (std::size_t i : {2, 3, 5}) {
        auto r = mg_battery(b.seqs[i]);
        o.require(r["mg_i"].fails() && strictly_increasing(r["mg_i"].witness_series),
                  b.seqs[i].label() + " item (i) series not strictly increasing");
    }
    if (o.ok) o.detail = "gevrey(1) C = " + format_real(std::exp(g["mg_i"].constants["log_C"]));
    return o;
}

Outcome strangechar_loop(const Battery& b) {
    Outcome o;
    std::string gs;
    for (const auto& m : b.seqs) {
        const auto g = moderate_growth_index(m, 8);
        const bool finite = std::isfinite(g.constants.at("g"));
        const auto mat = build_associated_matrix(WeightFunctionHandle::associated(m), dyadic_grid(), m.horizon());
        const auto r = quotient_root_comparison(mat, MatrixVariant::R);
        const auto bb = quotient_root_comparison(mat, MatrixVariant::B);
        o.require(r.holds() == finite && bb.holds() == finite && (finite || (r.fails() && bb.fails())),
                  "verdicts differ for " + m.label());
        gs += (gs.empty() ? "" : ", ") + m.label() + ": g=" + format_real(g.constants.at("g"));
    }
    auto g_of = [](const WeightSequence& m) { return moderate_growth_index(m, 8).constants.at("g"); };
    o.require(g_of(b.seqs[0]) == 1, "g(gevrey(1)) != 1");
    o.require(g_of(b.seqs[2]) == 2, "g(q_gevrey(2,2)) != 2");
    const auto de = moderate_growth_index(b.seqs[4], 8);
    o.require(de.constants.at("g") == 2, "g(double_exp) != 2");
    bool plateau = true;
    for (const auto& pt : de.sub_reports.at("d=2").witness_series)
        if (pt.prefix >= 2) plateau = plateau && std::exp(pt.value) <= 1 + 1e-6;
    o.require(plateau, "double_exp A_min(d=2) exceeds 1 + 1e-6");
    if (o.ok) o.detail = gs;
    return o;
}

Outcome counterexample_reproduction(const Battery& b) {
    Outcome o;
    const auto& n = counterexample(b);
    o.require(validate_lc(n).holds(), "N not LC");
    o.require(validate_schedule(b.schedule).holds(), "schedule invalid");
    double worst = 0;
    for (std::size_t d = 2; d <= 7; ++d) {
        const auto w = witness_divergence(b.schedule, n, d);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double l = static_cast<double>(d + k);
            worst = std::max(worst, std::abs(w[k] - l * l / static_cast<double>(d)));
            if (k > 0) o.require(w[k] > w[k - 1], "witness not increasing in l for d=" + std::to_string(d));
        }
    }
    o.require(worst <= 1e-9, "witness vs l^2/d " + sci(worst));
    // d = 8 has no level l in 8..7 when J = 8
    bool threw = false;
    try {
        witness_divergence(b.schedule, n, 8);
    } catch (const RangeError&) {
        threw = true;
    }
    o.require(threw, "d = 8 should have an empty level range");

    const auto g = moderate_growth_index(n, 8);
    o.require(!std::isfinite(g.constants.at("g")) && g.fails(), "moderate growth index finite");
    double min_step = kInf;
    for (std::size_t d = 1; d <= 8; ++d) {
        const auto& sub = g.sub_reports.at("d=" + std::to_string(d));
        o.require(sub.fails(), "plateau for d=" + std::to_string(d));
        // levels l >= d: prefixes a_l + 1
        const auto& s = sub.witness_series;
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i - 1].prefix < static_cast<double>(b.schedule.breakpoints[std::min(d, b.schedule.levels()) - 1] + 1))
                continue;
            min_step = std::min(min_step, s[i].value - s[i - 1].value);
        }
    }
    o.require(min_step >= 1, "A_min grows by less than e per level (" + format_real(min_step) + ")");
    if (o.ok) o.detail = "witness error " + sci(worst) + ", smallest log step per level " + format_real(min_step);
    return o;
}

Outcome variants() {
    Outcome o;
    const auto [spec, n] = build_counterexample(8, {}, 1.0);
    const auto pi2 = pi_transform(n, 2.0);
    const double est = liminf_ratio_estimate(pi2, 2);
    auto bg = beta_gamma(pi2, 2, 0.0);
    o.require(std::exp(est) >= 4 - 1e-6 && bg["beta1"].holds(),
              "pi^2(N) liminf " + format_real(std::exp(est)));

    const auto qa = build_schedule(8, {true, false}, 1.0);
    const auto sums = quasianalytic_block_sums(qa);
    o.require(sums.displayed >= sums.harmonic, "quasianalytic block sum below harmonic sum");

    const auto [sspec, sn] = build_counterexample(8, {false, true}, 1.0);
    o.require(validate_schedule(sspec).holds(), "strong_b schedule invalid");
    for (std::size_t d = 1; d <= 8; ++d)
        o.require(equlemma_check(sn, d).fails(), "equlemma does not fail for d=" + std::to_string(d));
    if (o.ok)
        o.detail = "liminf " + format_real(std::exp(est)) + ", block sum " + format_real(sums.displayed) +
                   " >= " + format_real(sums.harmonic);
    return o;
}

Outcome matrix_separation(const Battery& b) {
    Outcome o;
    const auto& n = counterexample(b);
    const auto mn = build_associated_matrix(WeightFunctionHandle::associated(n), dyadic_grid(), n.horizon());
    const auto m2 = build_associated_matrix(WeightFunctionHandle::omega_s(2.0), dyadic_grid(), 512);
    for (const auto* m : {&mn, &m2})
        for (auto v : {MatrixVariant::R, MatrixVariant::B})
            for (auto l : {MgLevel::I, MgLevel::II, MgLevel::III, MgLevel::IV, MgLevel::V})
                o.require(matrix_mg(*m, v, l).holds(), (m == &mn ? "M_omega_N" : "M_omega_2") +
                                                           std::string(" level ") + to_string(l) + " " +
                                                           to_string(v));
    o.require(quotient_root_comparison(mn, MatrixVariant::R).fails(), "rstrange does not fail for M_omega_N");
    o.require(quotient_root_comparison(mn, MatrixVariant::B).fails(), "bstrange does not fail for M_omega_N");
    if (o.ok) o.detail = "levels I-V hold (R, B); quotient/root comparison fails for M_omega_N";
    return o;
}

Outcome appendix(const Battery& b) {
    Outcome o;
    const auto m2 = build_associated_matrix(WeightFunctionHandle::omega_s(2.0), dyadic_grid(), 512);
    const auto cv = condv_propagation(m2, 1, 2, 2, 1.0);
    o.require(cv.sub_reports.at("identity").constants.at("max_relative_error") <= 1e-9, "c-identity error");
    for (const char* k : {"base", "cx", "x/c"}) o.require(cv.sub_reports.at(k).holds(), std::string(k) + " fails");
    o.require(cv.holds(), "propagation fails");
    o.require(admissibility_bundle(b.seqs[2]).holds(), "q_gevrey(2,2) not admissible");
    o.require(admissibility_bundle(b.seqs[0]).fails(), "gevrey(1) admissible");
    o.require(admissibility_bundle(counterexample(b)).fails(), "N admissible");
    if (o.ok) o.detail = "identity " + sci(cv.sub_reports.at("identity").constants.at("max_relative_error"));
    return o;
}

Outcome determinism() {
    Outcome o;
    const auto spec = parse_spec(std::string(R"({
        "inputs": [{"family": "gevrey", "params": {"s": 1}, "horizon": 256},
                   {"family": "q_gevrey", "params": {"q": 2, "n": 2}, "horizon": 256},
                   {"counterexample": {"levels": 8, "variant": ["minimal"]}}],
        "conditions": ["mg_battery", "genmg", "beta1", "gamma1", "om6", "rstrange", "matrix_mg_B"]})"));
    const auto first = emit_report(run_analysis(spec), "json");
    for (int i = 0; i < 2; ++i) o.require(emit_report(run_analysis(spec), "json") == first, "run differs");
    if (o.ok) o.detail = std::to_string(first.size()) + " bytes, 3 identical runs";
    return o;
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const Battery b = battery();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"exact identities", [&] { return exact_identities(b); }},
        {"conjugate interpolation vs oracle", [&] { return conjugate_oracle(b); }},
        {"matrix inequalities", [&] { return matrix_inequalities(b); }},
        {"mg battery coincidence", [&] { return mg_coincidence(b); }},
        {"quotient/root comparison vs moderate growth index", [&] { return strangechar_loop(b); }},
        {"counterexample reproduction", [&] { return counterexample_reproduction(b); }},
        {"counterexample variants", [] { return variants(); }},
        {"matrix mg levels vs quotient/root comparison", [&] { return matrix_separation(b); }},
        {"condv propagation and admissibility", [&] { return appendix(b); }},
        {"determinism", [] { return determinism(); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.ok;
        std::printf("%s %2zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("total %.1f s\n", secs);
    return failures == 0 ? 0 : 1;
}
