#include "ultraweight/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace ultraweight {

namespace {

bool same_index(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

std::string member_key(const MatrixMember& m) { return format_real(m.index) + (m.shifted ? "~" : ""); }

std::vector<std::size_t> scaled_checkpoints(const std::vector<std::size_t>& cps, double scale) {
    std::vector<std::size_t> out;
    for (auto c : cps) out.push_back(static_cast<std::size_t>(std::ceil(static_cast<double>(c) / scale - 1e-12)));
    return out;
}

WeightSequence shift_sequence(const WeightSequence& s) {
    const std::size_t h = s.horizon() / 4;
    if (h < 2) throw RangeError("shifted sequence of '" + s.label() + "' needs horizon >= 8");
    std::vector<double> v(h + 1);
    for (std::size_t p = 0; p <= h; ++p) v[p] = s[4 * p] / 4.0;
    return WeightSequence("~" + s.label(), std::move(v), scaled_checkpoints(s.checkpoints(), 4.0));
}

double tol(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

bool is_integer(double x) { return x >= 1 && std::abs(x - std::round(x)) <= 1e-12 * x; }

}  // namespace

std::string to_string(MatrixOrigin o) {
    switch (o) {
    case MatrixOrigin::FromOmega: return "from-omega";
    case MatrixOrigin::FromSequence: return "from-sequence";
    case MatrixOrigin::Shifted: return "shifted";
    case MatrixOrigin::Union: return "union";
    }
    return "";
}

MatrixOrigin matrix_origin_from_string(const std::string& s) {
    if (s == "from-omega") return MatrixOrigin::FromOmega;
    if (s == "from-sequence") return MatrixOrigin::FromSequence;
    if (s == "shifted") return MatrixOrigin::Shifted;
    if (s == "union") return MatrixOrigin::Union;
    throw InvalidInput("unknown matrix origin '" + s + "'");
}

WeightMatrix::WeightMatrix(std::vector<MatrixMember> members, MatrixOrigin origin,
                           std::optional<WeightFunctionHandle> base, std::size_t horizon)
    : members_(std::move(members)), origin_(origin), base_(std::move(base)), horizon_(horizon) {
    if (members_.empty()) throw InvalidInput("weight matrix needs at least one member");
    for (const auto& m : members_)
        if (!(m.index > 0)) throw InvalidInput("matrix indices must be positive");
    std::stable_sort(members_.begin(), members_.end(), [](const MatrixMember& a, const MatrixMember& b) {
        return a.index != b.index ? a.index < b.index : a.shifted < b.shifted;
    });
    if (horizon_ == 0)
        for (const auto& m : members_) horizon_ = std::max(horizon_, m.seq.horizon());
}

WeightMatrix WeightMatrix::singleton(WeightSequence m) {
    return WeightMatrix({MatrixMember{1.0, std::move(m), false}}, MatrixOrigin::FromSequence);
}

std::vector<double> WeightMatrix::indices() const {
    std::vector<double> out;
    for (const auto& m : members_) out.push_back(m.index);
    return out;
}

bool WeightMatrix::has_index(double x) const {
    return std::any_of(members_.begin(), members_.end(),
                       [x](const MatrixMember& m) { return !m.shifted && same_index(m.index, x); });
}

const MatrixMember& WeightMatrix::member(double x) const {
    for (const auto& m : members_)
        if (!m.shifted && same_index(m.index, x)) return m;
    throw InvalidInput("matrix has no member with index " + format_real(x));
}

std::vector<double> dyadic_grid(int kmin, int kmax) {
    std::vector<double> out;
    for (int k = kmin; k <= kmax; ++k) out.push_back(std::ldexp(1.0, k));
    return out;
}

WeightMatrix build_associated_matrix(const WeightFunctionHandle& w, std::vector<double> indices,
                                     std::size_t horizon) {
    if (indices.empty()) throw InvalidInput("empty index set");
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    const double range = w.conjugate_range();
    std::vector<std::size_t> base_cps;
    if (w.is_associated()) base_cps = w.assoc().source().checkpoints();

    std::vector<MatrixMember> members;
    for (double l : indices) {
        if (!(l > 0)) throw InvalidInput("matrix indices must be positive");
        std::size_t h = horizon;
        if (std::isfinite(range)) h = std::min(h, static_cast<std::size_t>(std::floor(range / l + 1e-12)));
        if (h < 2)
            throw RangeError("index " + format_real(l) + " leaves fewer than 2 exact entries");
        std::vector<double> v(h + 1, 0.0);
        for (std::size_t p = 1; p <= h; ++p) v[p] = w.conjugate(std::min(l * static_cast<double>(p), range)) / l;
        members.push_back({l, WeightSequence("W^(" + format_real(l) + ")[" + w.label() + "]", std::move(v),
                                             scaled_checkpoints(base_cps, l)),
                           false});
    }
    return WeightMatrix(std::move(members), MatrixOrigin::FromOmega, w, horizon);
}

WeightMatrix shifted_matrix(const WeightMatrix& m) {
    std::vector<MatrixMember> members;
    for (const auto& mem : m.members())
        if (!mem.shifted) members.push_back({mem.index, shift_sequence(mem.seq), false});
    return WeightMatrix(std::move(members), MatrixOrigin::Shifted, m.base(), m.horizon() / 4);
}

WeightMatrix mg_union(const WeightMatrix& m) {
    std::vector<MatrixMember> members;
    for (const auto& mem : m.members())
        if (!mem.shifted) members.push_back(mem);
    const bool omega = m.origin() == MatrixOrigin::FromOmega;
    for (const auto& mem : m.members()) {
        if (mem.shifted) continue;
        auto s = shift_sequence(mem.seq);
        if (omega) {
            const double y = 4 * mem.index;
            if (!m.has_index(y)) members.push_back({y, std::move(s), true});
        } else {
            members.push_back({mem.index, std::move(s), true});
        }
    }
    return WeightMatrix(std::move(members), MatrixOrigin::Union, m.base(), m.horizon());
}

RelationMode relation_mode_from_string(const std::string& s) {
    if (s == "roumieu") return RelationMode::Roumieu;
    if (s == "beurling") return RelationMode::Beurling;
    if (s == "quotient-roumieu") return RelationMode::QuotientRoumieu;
    if (s == "quotient-beurling") return RelationMode::QuotientBeurling;
    throw InvalidInput("unknown relation mode '" + s + "'");
}

std::string to_string(RelationMode m) {
    switch (m) {
    case RelationMode::Roumieu: return "roumieu";
    case RelationMode::Beurling: return "beurling";
    case RelationMode::QuotientRoumieu: return "quotient-roumieu";
    case RelationMode::QuotientBeurling: return "quotient-beurling";
    }
    return "";
}

ConditionReport member_preceq(const WeightSequence& a, const WeightSequence& b, bool quotient_wise) {
    const std::size_t h = std::min(a.horizon(), b.horizon());
    const auto at = a.horizon() == h ? a : a.truncated(h);
    const auto bt = b.horizon() == h ? b : b.truncated(h);
    if (!quotient_wise) return compare(at, bt);

    std::vector<double> terms(h);
    for (std::size_t p = 1; p <= h; ++p) terms[p - 1] = at.log_quotient(p) - bt.log_quotient(p);
    ConditionReport r;
    r.condition = "quotient_preceq";
    const auto cps = shared_checkpoints(at, bt, h);
    const auto schedule = prefix_schedule(h, cps);
    r.window = schedule_description(schedule, schedule_uses_checkpoints(h, cps));
    r.witness_series = running_max_series(terms, schedule);
    r.verdict = series_verdict(r.witness_series);
    r.constants["log_C"] = r.witness_series.empty() ? 0.0 : r.witness_series.back().value;
    return r;
}

ConditionReport witness_search(std::string condition, const MemberList& sources,
                               const std::function<MemberList(const MatrixMember&)>& candidates,
                               const MemberCheck& check) {
    ConditionReport r;
    r.condition = std::move(condition);
    bool all_hold = true, any_fail = false;
    for (const auto* s : sources) {
        ConditionReport best;
        bool found = false, any_inconclusive = false;
        double best_value = kInf;
        double best_index = 0;
        for (const auto* c : candidates(*s)) {
            auto rep = check(*s, *c);
            if (rep.holds()) {
                best = std::move(rep);
                best_index = c->index;
                found = true;
                break;
            }
            if (rep.verdict == Verdict::Inconclusive) any_inconclusive = true;
            const double v = rep.witness_series.empty() ? kInf : rep.witness_series.back().value;
            if (best_index == 0 || v < best_value) {
                best_value = v;
                best = std::move(rep);
                best_index = c->index;
            }
        }
        if (best_index == 0) best.notes.push_back("no candidate index");
        best.constants["witness_index"] = best_index;
        if (!found) {
            best.verdict = any_inconclusive ? Verdict::Inconclusive : Verdict::FailsOnHorizon;
            best.notes.push_back("no witness index found; best candidate recorded");
            all_hold = false;
            if (!any_inconclusive) any_fail = true;
        }
        r.sub_reports["source=" + member_key(*s)] = std::move(best);
    }
    r.verdict = all_hold ? Verdict::HoldsOnHorizon : any_fail ? Verdict::FailsOnHorizon : Verdict::Inconclusive;
    r.window = std::to_string(sources.size()) + " source indices, witnesses scanned in grid order";
    return r;
}

ConditionReport matrix_preceq(const WeightMatrix& a, const WeightMatrix& b, RelationMode mode) {
    const bool quotient = mode == RelationMode::QuotientRoumieu || mode == RelationMode::QuotientBeurling;
    const bool roumieu = mode == RelationMode::Roumieu || mode == RelationMode::QuotientRoumieu;
    // Roumieu: for all x in a there is y in b; Beurling: for all y in b there is x in a.
    const WeightMatrix& src = roumieu ? a : b;
    const WeightMatrix& cand = roumieu ? b : a;

    const auto idx = src.indices();
    const double lo = idx.front(), hi = idx.back();
    MemberList sources, all_sources, targets;
    for (const auto& m : src.members()) {
        all_sources.push_back(&m);
        if (roumieu ? m.index <= hi / 4 : m.index >= 4 * lo) sources.push_back(&m);
    }
    if (sources.empty()) sources = all_sources;
    for (const auto& m : cand.members()) targets.push_back(&m);

    return witness_search(
        std::string(quotient ? "quotient_" : "") + "matrix_preceq[" + (roumieu ? "R" : "B") + "]", sources,
        [&](const MatrixMember&) { return targets; },
        [&](const MatrixMember& s, const MatrixMember& c) {
            return roumieu ? member_preceq(s.seq, c.seq, quotient) : member_preceq(c.seq, s.seq, quotient);
        });
}

ConditionReport matrix_relation(const WeightMatrix& a, const WeightMatrix& b, RelationMode mode) {
    ConditionReport r;
    r.condition = "matrix_equivalence[" + to_string(mode) + "]";
    auto ab = matrix_preceq(a, b, mode);
    auto ba = matrix_preceq(b, a, mode);
    if (ab.holds() && ba.holds())
        r.verdict = Verdict::HoldsOnHorizon;
    else if (ab.fails() || ba.fails())
        r.verdict = Verdict::FailsOnHorizon;
    else
        r.verdict = Verdict::Inconclusive;
    r.window = "both directions";
    r.sub_reports["a<=b"] = std::move(ab);
    r.sub_reports["b<=a"] = std::move(ba);
    return r;
}

ConditionReport quotient_identity_suite(const WeightMatrix& m, std::size_t c) {
    if (m.origin() != MatrixOrigin::FromOmega || !m.base())
        throw InvalidInput("quotient identities need a from-omega matrix");
    if (c == 0) throw InvalidInput("c must be >= 1");
    ConditionReport r;
    r.condition = "quotient_identities";
    double worst_avg = 0, worst_upper = 0, worst_dual = 0, worst_c = 0;
    std::size_t checked_c = 0;
    std::optional<std::size_t> first_bad;

    auto note = [&](double& worst, double excess, std::size_t p) {
        worst = std::max(worst, excess);
        if (excess > 0 && !first_bad) first_bad = p;
    };

    if (m.base()->is_associated()) {
        const auto& M = m.base()->assoc().source();
        for (const auto& mem : m.members()) {
            if (mem.shifted) continue;
            const double x = mem.index;
            if (is_integer(x)) {
                const auto xi = static_cast<std::size_t>(std::llround(x));
                for (std::size_t p = 1; p <= mem.seq.horizon() && xi * p <= M.horizon(); ++p) {
                    double sum = 0;
                    for (std::size_t i = xi * p - xi + 1; i <= xi * p; ++i) sum += M.log_quotient(i);
                    const double lhs = mem.seq.log_quotient(p);
                    const double avg = sum / x;
                    note(worst_avg, std::abs(lhs - avg) - tol(avg), p);
                    note(worst_upper, lhs - M.log_quotient(xi * p) - tol(lhs), p);
                }
            }
            const double y = 1.0 / x;
            if (x < 1 && is_integer(y)) {
                const auto yi = static_cast<std::size_t>(std::llround(y));
                for (std::size_t p = 1; yi * p <= mem.seq.horizon() && p <= M.horizon(); ++p) {
                    const double lhs = mem.seq.log_quotient(yi * p);
                    note(worst_dual, M.log_quotient(p) - lhs - tol(lhs), p);
                }
            }
        }
    }
    const double cd = static_cast<double>(c);
    for (const auto& mem : m.members()) {
        if (mem.shifted || !m.has_index(cd * mem.index)) continue;
        const auto& big = m.member(cd * mem.index).seq;
        for (std::size_t p = 1; p <= big.horizon() && c * p <= mem.seq.horizon(); ++p) {
            double sum = 0;
            for (std::size_t i = c * (p - 1) + 1; i <= c * p; ++i) sum += mem.seq.log_quotient(i);
            const double rhs = sum / cd;
            note(worst_c, std::abs(big.log_quotient(p) - rhs) - tol(rhs), p);
            ++checked_c;
        }
    }
    if (checked_c == 0) throw InvalidInput("no grid index x with c*x in the grid (c = " + std::to_string(c) + ")");

    r.constants["excess_average_identity"] = worst_avg;
    r.constants["excess_upper_bound"] = worst_upper;
    r.constants["excess_dual_bound"] = worst_dual;
    r.constants["excess_c_identity"] = worst_c;
    r.constants["c"] = cd;
    r.witness_index = first_bad;
    r.verdict = first_bad ? Verdict::FailsOnHorizon : Verdict::HoldsOnHorizon;
    r.window = "all p with indices inside the member horizons; tolerance 1e-9 max(1, |value|)";
    return r;
}

ConditionReport mixed_mg_check(const WeightMatrix& m, std::size_t max_pq) {
    ConditionReport r;
    r.condition = "mixed_mg";
    double worst = -kInf;
    std::size_t pairs = 0;
    for (const auto& mem : m.members()) {
        if (mem.shifted || !m.has_index(2 * mem.index)) continue;
        const auto& small = mem.seq;
        const auto& big = m.member(2 * mem.index).seq;
        for (std::size_t n = 0; n <= std::min(max_pq, small.horizon()); ++n)
            for (std::size_t p = 0; p <= n; ++p) {
                const std::size_t q = n - p;
                if (p > big.horizon() || q > big.horizon()) continue;
                const double rhs = big[p] + big[q];
                worst = std::max(worst, (small[n] - rhs) / std::max(1.0, std::abs(rhs)));
                ++pairs;
            }
        r.constants["checked_index_" + format_real(mem.index)] = 1;
    }
    if (pairs == 0) throw InvalidInput("no grid index l with 2l in the grid");
    r.constants["max_relative_slack"] = worst;
    r.verdict = worst <= 1e-9 ? Verdict::HoldsOnHorizon : Verdict::FailsOnHorizon;
    r.window = "p + q <= " + std::to_string(max_pq);
    return r;
}

ConditionReport omega_sandwich_check(const WeightMatrix& m, std::size_t samples) {
    if (!m.base()) throw InvalidInput("sandwich check needs a from-omega matrix");
    const auto& w = *m.base();
    ConditionReport r;
    r.condition = "omega_sandwich";
    bool ok = true;
    for (const auto& mem : m.members()) {
        if (mem.shifted) continue;
        const AssociatedFunction a(mem.seq);
        const double hi = std::min(w.log_range(), a.log_range());
        const double lo = 1e-3;
        ConditionReport sub;
        sub.condition = "omega_sandwich";
        if (!(hi > lo)) {
            sub.verdict = Verdict::Inconclusive;
            sub.notes.push_back("empty common exact range");
            ok = false;
            r.sub_reports["l=" + format_real(mem.index)] = std::move(sub);
            continue;
        }
        std::vector<double> us;
        for (std::size_t i = 0; i < samples; ++i)
            us.push_back(lo * std::exp(std::log(hi / lo) * static_cast<double>(i) / static_cast<double>(samples - 1)));
        us.back() = hi;
        for (double q : a.log_quotients())
            if (q > lo && q < hi) us.push_back(q);
        double lower_excess = -kInf, D = 0;
        const double l = mem.index;
        for (double u : us) {
            const double om = w.omega_log(u);
            const double ow = a.omega_log(u);
            lower_excess = std::max(lower_excess, (l * ow - om) / std::max(1.0, om));
            D = std::max(D, om - 2 * l * ow);
        }
        sub.constants["D_l"] = D;
        sub.constants["lower_relative_excess"] = lower_excess;
        sub.verdict = lower_excess <= 1e-6 ? Verdict::HoldsOnHorizon : Verdict::FailsOnHorizon;
        if (!sub.holds()) ok = false;
        sub.window = std::to_string(us.size()) + " log t samples up to " + format_real(hi);
        r.sub_reports["l=" + format_real(l)] = std::move(sub);
    }
    r.verdict = ok ? Verdict::HoldsOnHorizon : Verdict::FailsOnHorizon;
    return r;
}

ConditionReport shifted_quotient_check(const WeightMatrix& m, std::size_t max_p) {
    ConditionReport r;
    r.condition = "shifted_quotient_bound";
    bool ok = true;
    for (const auto& mem : m.members()) {
        if (mem.shifted || mem.seq.horizon() < 8) continue;
        const auto& s = mem.seq;
        const auto t = shift_sequence(s);
        const double logA = std::max(0.0, s.log_quotient(2) - t.log_quotient(1));
        double worst = -kInf;
        for (std::size_t p = 2; p <= max_p && p <= t.horizon() && 2 * p <= s.horizon(); ++p) {
            const double rhs = logA + t.log_quotient(p);
            worst = std::max(worst, s.log_quotient(2 * p) - rhs - tol(rhs));
        }
        r.constants["log_A@" + format_real(mem.index)] = logA;
        if (worst > 0) {
            ok = false;
            r.notes.push_back("bound violated for index " + format_real(mem.index));
        }
    }
    r.verdict = ok ? Verdict::HoldsOnHorizon : Verdict::FailsOnHorizon;
    r.window = "2 <= p <= " + std::to_string(max_p);
    return r;
}

ConditionReport pointwise_order_check(const WeightMatrix& m, bool quotients) {
    ConditionReport r;
    r.condition = quotients ? "quotient_order" : "pointwise_order";
    r.verdict = Verdict::HoldsOnHorizon;
    const MatrixMember* prev = nullptr;
    for (const auto& mem : m.members()) {
        if (mem.shifted) continue;
        if (prev) {
            const std::size_t h = std::min(prev->seq.horizon(), mem.seq.horizon());
            for (std::size_t p = 1; p <= h; ++p) {
                const double a = quotients ? prev->seq.log_quotient(p) : prev->seq[p];
                const double b = quotients ? mem.seq.log_quotient(p) : mem.seq[p];
                if (a > b + tol(b)) {
                    r.verdict = Verdict::FailsOnHorizon;
                    r.witness_index = p;
                    r.notes.push_back("order fails between " + format_real(prev->index) + " and " +
                                      format_real(mem.index) + " at p=" + std::to_string(p));
                    return r;
                }
            }
        }
        prev = &mem;
    }
    return r;
}

nlohmann::json to_json(const WeightMatrix& m) {
    nlohmann::json j;
    j["indices"] = m.indices();
    j["horizon"] = m.horizon();
    j["origin"] = to_string(m.origin());
    nlohmann::json members = nlohmann::json::object();
    for (const auto& mem : m.members())
        members[member_key(mem)] = std::vector<double>(mem.seq.log_values().begin(), mem.seq.log_values().end());
    j["members"] = members;
    return j;
}

WeightMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("members") || !j["members"].is_object())
        throw InvalidInput("matrix document needs a 'members' object");
    std::vector<MatrixMember> members;
    for (auto& [key, values] : j["members"].items()) {
        std::string k = key;
        const bool shifted = !k.empty() && k.back() == '~';
        if (shifted) k.pop_back();
        double x;
        try {
            x = std::stod(k);
        } catch (const std::exception&) {
            throw InvalidInput("bad matrix index '" + key + "'");
        }
        if (!values.is_array()) throw InvalidInput("member '" + key + "' must be an array of log values");
        members.push_back({x, WeightSequence("M^(" + key + ")", values.get<std::vector<double>>()), shifted});
    }
    const auto origin = matrix_origin_from_string(j.value("origin", std::string("from-sequence")));
    return WeightMatrix(std::move(members), origin, std::nullopt, j.value("horizon", std::size_t{0}));
}

}  // namespace ultraweight
