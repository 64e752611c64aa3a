#include "ultraweight/conditions.hpp"

#include <algorithm>
#include <cmath>

namespace ultraweight {

namespace {

const double kMargin = std::log1p(1e-6);

// Levels III and V sample t up to the quotients below P/4; shorter members
// give fewer than four prefixes and an undecidable series.
constexpr std::size_t kMinMgMemberHorizon = 128;

// Prefix-optimal series of a sup-type condition; terms[k] belongs to index k+1.
ConditionReport sup_report(std::string condition, const std::vector<double>& terms, std::size_t range,
                           const std::vector<std::size_t>& checkpoints, const std::string& constant) {
    ConditionReport r;
    r.condition = std::move(condition);
    const auto schedule = prefix_schedule(range, checkpoints);
    r.window = schedule_description(schedule, schedule_uses_checkpoints(range, checkpoints));
    r.witness_series = running_max_series(terms, schedule);
    r.verdict = series_verdict(r.witness_series);
    r.constants[constant] = r.witness_series.empty() ? 0.0 : r.witness_series.back().value;
    return r;
}

// Max over 1 <= p <= R of (L_{p+R} - R_p - R_R)/(p+R), for R = 1..range.
std::vector<double> pair_terms(const WeightSequence& lhs, const WeightSequence& rhs, std::size_t range) {
    std::vector<double> terms(range, -kInf);
    for (std::size_t big = 1; big <= range; ++big)
        for (std::size_t p = 1; p <= big; ++p) {
            const double v = (lhs[p + big] - rhs[p] - rhs[big]) / static_cast<double>(p + big);
            terms[big - 1] = std::max(terms[big - 1], v);
        }
    return terms;
}

ConditionReport doubling_report(std::string condition, const WeightSequence& lhs, const WeightSequence& rhs,
                                bool use_sigma, bool additive) {
    const AssociatedFunction la(lhs), ra(rhs);
    const auto lf = use_sigma ? sigma_piecewise(la) : omega_piecewise(WeightFunctionHandle::associated(lhs));
    const auto rf = use_sigma ? sigma_piecewise(ra) : omega_piecewise(WeightFunctionHandle::associated(rhs));
    ConditionReport r;
    r.condition = std::move(condition);
    const auto prefixes = quotient_prefixes(ra.log_quotients(), rhs.checkpoints(), la.log_range());
    r.witness_series = doubling_constant_series(lf, rf, prefixes, additive);
    r.verdict = series_verdict(r.witness_series);
    r.constants["log_H"] = r.witness_series.empty() ? 0.0 : r.witness_series.back().value;
    r.window = std::string("exact at kinks, t-prefixes at rhs quotients over P/4") +
               (additive ? ", additive H" : "");
    return r;
}

bool is_integer_index(double x) { return x >= 1 && std::abs(x - std::round(x)) <= 1e-12 * x; }

ConditionReport liminf_report(std::string condition, double estimate, double threshold, std::size_t P,
                              std::size_t Q) {
    ConditionReport r;
    r.condition = std::move(condition);
    r.constants["log_liminf_estimate"] = estimate;
    r.constants["log_threshold"] = threshold;
    r.verdict = estimate > threshold + kMargin ? Verdict::HoldsOnHorizon : Verdict::FailsOnHorizon;
    r.window = "min over p in [" + std::to_string(std::max<std::size_t>(1, P / (2 * Q))) + "," +
               std::to_string(P / Q) + "], margin 1e-6";
    return r;
}

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

Verdict conjunction(std::initializer_list<Verdict> vs) {
    bool all = true;
    for (auto v : vs) {
        if (v == Verdict::FailsOnHorizon) return v;
        if (v != Verdict::HoldsOnHorizon) all = false;
    }
    return all ? Verdict::HoldsOnHorizon : Verdict::Inconclusive;
}

}  // namespace

std::map<std::string, ConditionReport> mg_battery(const WeightSequence& m) {
    if (!m.is_log_convex() || !m.is_normalized())
        throw InvalidInput("mg battery items iv/v need an LC sequence ('" + m.label() + "')");
    const std::size_t P = m.horizon();
    const auto& cps = m.checkpoints();
    std::map<std::string, ConditionReport> out;

    const std::size_t pair_range = std::min<std::size_t>(P / 2, 1024);
    out["mg_i"] = sup_report("mg_i", pair_terms(m, m, pair_range), pair_range, cps, "log_C");

    std::vector<double> t2, t3;
    for (std::size_t p = 1; p <= P / 2; ++p) {
        t2.push_back((m[2 * p] - 2 * m[p]) / static_cast<double>(2 * p));
        t3.push_back(m.log_quotient(2 * p) - m.log_quotient(p));
    }
    out["mg_ii"] = sup_report("mg_ii", t2, P / 2, cps, "log_A");
    out["mg_iii"] = sup_report("mg_iii", t3, P / 2, cps, "log_A");
    out["mg_iv"] = doubling_report("mg_iv", m, m, false, true);
    out["mg_v"] = doubling_report("mg_v", m, m, true, true);

    std::vector<double> t6;
    for (std::size_t p = 1; p <= P; ++p) t6.push_back(m.log_quotient(p) - m[p] / static_cast<double>(p));
    out["mg_vi"] = sup_report("mg_vi", t6, P, cps, "log_A");

    ConditionReport meta;
    meta.condition = "mg_coincide";
    const Verdict first = out["mg_i"].verdict;
    bool same = true;
    for (const auto& [k, r] : out) {
        meta.notes.push_back(k + ": " + to_string(r.verdict));
        if (r.verdict != first) same = false;
    }
    meta.verdict = same ? Verdict::HoldsOnHorizon : Verdict::FailsOnHorizon;
    meta.window = "six items";
    out["mg_coincide"] = std::move(meta);
    return out;
}

std::map<std::string, ConditionReport> growth_flags(const WeightSequence& m) {
    const std::size_t P = m.horizon();
    const auto& cps = m.checkpoints();
    std::map<std::string, ConditionReport> out;

    std::vector<double> dc, mu;
    for (std::size_t k = 1; k <= P; ++k) dc.push_back(m.log_quotient(k) / static_cast<double>(k));
    for (std::size_t p = 1; p < P; ++p) mu.push_back(m.log_quotient(p + 1) - m.log_quotient(p));
    out["dc"] = sup_report("dc", dc, P, cps, "log_D");
    out["mualmost"] = sup_report("mualmost", mu, P - 1, cps, "log_A");

    ConditionReport q;
    q.condition = "quasianalytic";
    const auto schedule = prefix_schedule(P, cps);
    q.window = "log partial sums of 1/mu_p, " + schedule_description(schedule, schedule_uses_checkpoints(P, cps));
    double log_sum = -kInf;
    std::size_t k = 1;
    for (auto prefix : schedule) {
        for (; k <= prefix; ++k) log_sum = log_add(log_sum, -m.log_quotient(k));
        q.witness_series.push_back({static_cast<double>(prefix), log_sum});
    }
    // a converging series reads as a plateau, i.e. the sum stays bounded
    switch (series_verdict(q.witness_series)) {
    case Verdict::HoldsOnHorizon: q.verdict = Verdict::FailsOnHorizon; break;
    case Verdict::FailsOnHorizon: q.verdict = Verdict::HoldsOnHorizon; break;
    case Verdict::Inconclusive: q.verdict = Verdict::Inconclusive; break;
    }
    q.constants["log_partial_sum"] = log_sum;
    out["quasianalytic"] = std::move(q);
    return out;
}

double liminf_ratio_estimate(const WeightSequence& m, std::size_t Q) {
    if (Q < 2) throw InvalidInput("Q must be >= 2");
    const std::size_t P = m.horizon();
    const std::size_t lo = std::max<std::size_t>(1, P / (2 * Q)), hi = P / Q;
    if (lo > hi) throw InvalidInput("liminf window empty for horizon " + std::to_string(P));
    double best = kInf;
    for (std::size_t p = lo; p <= hi; ++p) best = std::min(best, m.log_quotient(Q * p) - m.log_quotient(p));
    return best;
}

std::map<std::string, ConditionReport> beta_gamma(const WeightSequence& m, std::size_t Q, double beta) {
    if (!(beta >= 0)) throw InvalidInput("beta must be >= 0");
    const std::size_t P = m.horizon();
    const double est = liminf_ratio_estimate(m, Q);
    const double lq = std::log(static_cast<double>(Q));
    std::map<std::string, ConditionReport> out;
    out["beta1"] = liminf_report("beta1", est, lq, P, Q);
    out["beta3"] = liminf_report("beta3", est, 0.0, P, Q);
    out["condv"] = liminf_report("condv", est, beta * lq, P, Q);

    // gamma1 on prefix P': max_{p <= P'/2} (log mu_p - log p + log sum_{p<=k<=P'} 1/mu_k)
    ConditionReport g;
    g.condition = "gamma1";
    const auto schedule = prefix_schedule(P, m.checkpoints());
    double best = 0;
    for (auto prefix : schedule) {
        std::vector<double> tail(prefix + 2, -kInf);
        for (std::size_t k = prefix; k >= 1; --k) tail[k] = log_add(tail[k + 1], -m.log_quotient(k));
        double v = 0;
        for (std::size_t p = 1; p <= std::max<std::size_t>(1, prefix / 2); ++p)
            v = std::max(v, m.log_quotient(p) - std::log(static_cast<double>(p)) + tail[p]);
        best = std::max(best, v);
        g.witness_series.push_back({static_cast<double>(prefix), best});
    }
    g.verdict = series_verdict(g.witness_series);
    g.constants["log_C"] = best;
    g.constants["truncation_index"] = schedule.empty() ? 0.0 : static_cast<double>(schedule.back());
    g.window = "p <= P'/2, tail sums cut at P', " +
               schedule_description(schedule, schedule_uses_checkpoints(P, m.checkpoints()));
    out["gamma1"] = std::move(g);
    return out;
}

ConditionReport moderate_growth_index(const WeightSequence& m, std::size_t d_max) {
    if (d_max < 1) throw InvalidInput("d_max must be >= 1");
    const std::size_t R = m.horizon() / d_max;
    if (R < 2) throw InvalidInput("horizon too small for d_max = " + std::to_string(d_max));
    ConditionReport r;
    r.condition = "genmg";
    std::optional<std::size_t> g;
    bool inconclusive = false;
    for (std::size_t d = 1; d <= d_max; ++d) {
        std::vector<double> terms;
        for (std::size_t p = 1; p <= R; ++p)
            terms.push_back(m.log_quotient(p) - m[d * p] / static_cast<double>(d * p));
        auto sub = sup_report("genmg_d", terms, R, m.checkpoints(), "log_A");
        sub.constants["d"] = static_cast<double>(d);
        if (sub.holds() && !g) g = d;
        if (sub.verdict == Verdict::Inconclusive) inconclusive = true;
        r.constants["log_A_d" + std::to_string(d)] = sub.constants["log_A"];
        if (d == 1) r.window = sub.window;
        r.sub_reports["d=" + std::to_string(d)] = std::move(sub);
    }
    r.constants["g"] = g ? static_cast<double>(*g) : kInf;
    r.verdict = g ? Verdict::HoldsOnHorizon : inconclusive ? Verdict::Inconclusive : Verdict::FailsOnHorizon;
    if (!g) r.notes.push_back("no d <= " + std::to_string(d_max) + " gives a bounded series");
    return r;
}

MatrixVariant matrix_variant_from_string(const std::string& s) {
    if (s == "R") return MatrixVariant::R;
    if (s == "B") return MatrixVariant::B;
    throw InvalidInput("unknown matrix variant '" + s + "'");
}

MgLevel mg_level_from_string(const std::string& s) {
    if (s == "I") return MgLevel::I;
    if (s == "II") return MgLevel::II;
    if (s == "III") return MgLevel::III;
    if (s == "IV") return MgLevel::IV;
    if (s == "V") return MgLevel::V;
    throw InvalidInput("unknown mg level '" + s + "'");
}

std::string to_string(MatrixVariant v) { return v == MatrixVariant::R ? "R" : "B"; }

std::string to_string(MgLevel l) {
    switch (l) {
    case MgLevel::I: return "I";
    case MgLevel::II: return "II";
    case MgLevel::III: return "III";
    case MgLevel::IV: return "IV";
    case MgLevel::V: return "V";
    }
    return "";
}

ConditionReport mixed_mg_pair(const WeightSequence& lhs, const WeightSequence& rhs, MgLevel level) {
    const std::string name = "mixed_mg_" + to_string(level);
    const std::size_t HL = lhs.horizon(), HR = rhs.horizon();
    switch (level) {
    case MgLevel::I: {
        const std::size_t range = std::min<std::size_t>({HL / 2, HR, 1024});
        if (range < 1) throw InvalidInput("horizon too small for level I");
        return sup_report(name, pair_terms(lhs, rhs, range), range, shared_checkpoints(lhs, rhs, range), "log_C");
    }
    case MgLevel::II:
    case MgLevel::IV: {
        const std::size_t range = std::min(HL / 2, HR);
        if (range < 1) throw InvalidInput("horizon too small");
        std::vector<double> terms;
        for (std::size_t p = 1; p <= range; ++p)
            terms.push_back(level == MgLevel::II ? (lhs[2 * p] - 2 * rhs[p]) / static_cast<double>(2 * p)
                                                 : lhs.log_quotient(2 * p) - rhs.log_quotient(p));
        return sup_report(name, terms, range, shared_checkpoints(lhs, rhs, range),
                          level == MgLevel::II ? "log_C" : "log_A");
    }
    case MgLevel::III: return doubling_report(name, lhs, rhs, false, true);
    case MgLevel::V: return doubling_report(name, lhs, rhs, true, false);
    }
    throw InvalidInput("unknown level");
}

ConditionReport matrix_mg(const WeightMatrix& m, MatrixVariant variant, MgLevel level) {
    const bool roumieu = variant == MatrixVariant::R;
    MemberList sources, all;
    for (const auto& mem : m.members())
        if (mem.seq.horizon() >= kMinMgMemberHorizon) all.push_back(&mem);
    const bool short_members = all.empty();
    if (short_members)
        for (const auto& mem : m.members()) all.push_back(&mem);
    const double lo = all.front()->index, hi = all.back()->index;
    for (const auto* mem : all)
        if (roumieu ? mem->index <= hi / 4 : mem->index >= 4 * lo) sources.push_back(mem);
    if (sources.empty()) sources = all;

    auto candidates = [&](const MatrixMember& s) {
        MemberList out;
        if (roumieu) {
            for (const auto* c : all)
                if (c->index >= s.index) out.push_back(c);
        } else {
            for (auto it = all.rbegin(); it != all.rend(); ++it)
                if ((*it)->index <= s.index) out.push_back(*it);
        }
        return out;
    };
    auto check = [&](const MatrixMember& s, const MatrixMember& c) {
        return roumieu ? mixed_mg_pair(s.seq, c.seq, level) : mixed_mg_pair(c.seq, s.seq, level);
    };
    auto r = witness_search("matrix_mg_" + to_string(level) + "_" + to_string(variant), sources, candidates, check);
    if (all.size() < m.members().size())
        r.notes.push_back("members with horizon < " + std::to_string(kMinMgMemberHorizon) + " left out");
    if (short_members) r.notes.push_back("every member is shorter than " + std::to_string(kMinMgMemberHorizon));
    return r;
}

ConditionReport quotient_root_comparison(const WeightMatrix& m, MatrixVariant variant, std::size_t d_max) {
    const bool roumieu = variant == MatrixVariant::R;
    MemberList pool;
    for (const auto& mem : m.members()) {
        if (mem.shifted) continue;
        if (roumieu ? is_integer_index(mem.index) : is_integer_index(1.0 / mem.index)) pool.push_back(&mem);
    }
    if (pool.empty())
        throw InvalidInput(std::string("grid has no ") + (roumieu ? "integer" : "reciprocal-integer") + " indices");
    const double lo = pool.front()->index, hi = pool.back()->index;
    MemberList sources;
    for (const auto* p : pool)
        if (roumieu ? p->index <= hi / 4 : p->index >= 4 * lo) sources.push_back(p);
    if (sources.empty()) sources = pool;

    const double dm = static_cast<double>(d_max);
    auto candidates = [&](const MatrixMember& s) {
        MemberList out;
        if (roumieu) {
            for (const auto* c : pool)
                if (c->index >= s.index && c->index <= dm * s.index * (1 + 1e-12)) out.push_back(c);
        } else {
            for (auto it = pool.rbegin(); it != pool.rend(); ++it)
                if ((*it)->index <= s.index && (*it)->index * dm >= s.index * (1 - 1e-12)) out.push_back(*it);
        }
        return out;
    };
    // quotients of `qs` against roots of `rs`
    auto check = [&](const MatrixMember& s, const MatrixMember& c) {
        const auto& qs = roumieu ? s.seq : c.seq;
        const auto& rs = roumieu ? c.seq : s.seq;
        const std::size_t h = std::min(qs.horizon(), rs.horizon());
        std::vector<double> terms;
        for (std::size_t p = 1; p <= h; ++p) terms.push_back(qs.log_quotient(p) - rs[p] / static_cast<double>(p));
        return sup_report("quotient_root_pair", terms, h, shared_checkpoints(qs, rs, h), "log_A");
    };
    return witness_search(std::string("quotient_root_comparison_") + (roumieu ? "R" : "B"), sources, candidates,
                          check);
}

ConditionReport equlemma_check(const WeightSequence& n, std::size_t d, bool witness_on) {
    if (d < 1) throw InvalidInput("d must be >= 1");
    const std::size_t R = n.horizon() / d;
    if (R < 2) throw InvalidInput("horizon too small for d = " + std::to_string(d));
    ConditionReport r;
    r.condition = "equlemma";
    r.verdict = Verdict::FailsOnHorizon;
    bool inconclusive = false;
    for (double C : {1.0, 2.0, 4.0, 8.0}) {
        std::vector<double> terms;
        const double lc = std::log(C);
        for (std::size_t p = 1; p <= R; ++p)
            terms.push_back(n.log_quotient(p) - 2.0 * static_cast<double>(p) * lc - n[d * p] / static_cast<double>(d * p));
        auto sub = sup_report("equlemma_C", terms, R, n.checkpoints(), "log_A");
        sub.constants["C"] = C;
        if (sub.holds() && !r.holds()) {
            r.verdict = Verdict::HoldsOnHorizon;
            r.constants["C"] = C;
            r.constants["log_A"] = sub.constants["log_A"];
        }
        if (sub.verdict == Verdict::Inconclusive) inconclusive = true;
        if (r.window.empty()) r.window = sub.window;
        if (witness_on) r.sub_reports["C=" + format_real(C)] = std::move(sub);
    }
    if (!r.holds() && inconclusive) r.verdict = Verdict::Inconclusive;
    r.constants["d"] = static_cast<double>(d);
    return r;
}

ConditionReport admissibility_bundle(const WeightSequence& m, std::size_t d_max) {
    ConditionReport r;
    r.condition = "admissibility";
    auto bg = beta_gamma(m, 2, 0.0);
    auto flags = growth_flags(m);
    auto genmg = moderate_growth_index(m, d_max);
    auto& mualmost = flags["mualmost"];

    ConditionReport inherited;
    inherited.condition = "inherited_mualmost";
    if (mualmost.holds()) {
        const double logA = mualmost.constants["log_A"];
        inherited.verdict = Verdict::HoldsOnHorizon;
        for (std::size_t c = 2; c <= 4; ++c) {
            const std::size_t h = m.horizon() / c;
            double worst = -kInf;
            auto q = [&](std::size_t p) { return (m[c * p] - m[c * (p - 1)]) / static_cast<double>(c); };
            for (std::size_t p = 1; p < h; ++p) worst = std::max(worst, q(p + 1) - q(p));
            inherited.constants["log_A_c" + std::to_string(c)] = worst;
            if (worst > static_cast<double>(c) * logA + 1e-9 * std::max(1.0, std::abs(logA)))
                inherited.verdict = Verdict::FailsOnHorizon;
        }
        inherited.window = "members (M_{cp})^{1/c}, c = 2, 3, 4";
    } else {
        inherited.notes.push_back("not evaluated: (mualmost) does not hold");
    }

    r.verdict = conjunction({bg["beta1"].verdict, genmg.verdict, mualmost.verdict});
    r.window = "beta1 (Q = 2), genmg (d <= " + std::to_string(d_max) + "), mualmost";
    r.sub_reports["beta1"] = std::move(bg["beta1"]);
    r.sub_reports["genmg"] = std::move(genmg);
    r.sub_reports["mualmost"] = std::move(mualmost);
    r.sub_reports["inherited_mualmost"] = std::move(inherited);
    return r;
}

ConditionReport condv_propagation(const WeightMatrix& m, double x, std::size_t c, std::size_t Q, double beta) {
    if (c < 1) throw InvalidInput("c must be >= 1");
    const double cd = static_cast<double>(c);
    for (double i : {x, cd * x, x / cd})
        if (!m.has_index(i)) throw InvalidInput("grid lacks index " + format_real(i));
    const auto& base = m.member(x).seq;
    const auto& up = m.member(cd * x).seq;
    const auto& down = m.member(x / cd).seq;
    const double lq = std::log(static_cast<double>(Q));

    ConditionReport r;
    r.condition = "condv_propagation";
    r.sub_reports["base"] = liminf_report("condv", liminf_ratio_estimate(base, Q), beta * lq, base.horizon(), Q);
    r.sub_reports["cx"] = liminf_report("condv", liminf_ratio_estimate(up, Q), beta * lq, up.horizon(), Q);
    r.sub_reports["x/c"] = liminf_report("beta3", liminf_ratio_estimate(down, 4 * Q), 0.0, down.horizon(), 4 * Q);

    ConditionReport id;
    id.condition = "c_identity";
    double worst = 0;
    for (std::size_t p = 1; p <= up.horizon() && c * p <= base.horizon(); ++p) {
        double sum = 0;
        for (std::size_t i = c * (p - 1) + 1; i <= c * p; ++i) sum += base.log_quotient(i);
        const double rhs = sum / cd;
        worst = std::max(worst, std::abs(up.log_quotient(p) - rhs) / std::max(1.0, std::abs(rhs)));
    }
    id.constants["max_relative_error"] = worst;
    id.verdict = worst <= 1e-9 ? Verdict::HoldsOnHorizon : Verdict::FailsOnHorizon;
    r.sub_reports["identity"] = std::move(id);

    const auto& b = r.sub_reports["base"];
    const bool propagated = r.sub_reports["cx"].holds() && r.sub_reports["x/c"].holds();
    r.constants["propagation_observed"] = !b.holds() || propagated ? 1.0 : 0.0;
    if (!r.sub_reports["identity"].holds() || b.fails() || (b.holds() && !propagated))
        r.verdict = Verdict::FailsOnHorizon;
    else
        r.verdict = Verdict::HoldsOnHorizon;
    r.window = "x = " + format_real(x) + ", c = " + std::to_string(c) + ", Q = " + std::to_string(Q) +
               ", beta = " + format_real(beta);
    return r;
}

}  // namespace ultraweight
