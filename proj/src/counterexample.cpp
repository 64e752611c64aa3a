#include "ultraweight/counterexample.hpp"

#include <algorithm>
#include <cmath>

namespace ultraweight {

namespace {

double b_rhs(std::size_t j, double a, double fa, bool strong) {
    const double jj = static_cast<double>(j * j);
    double num = fa + jj * (a + 1);
    if (strong) num += 2 * jj * (a + 1) * (a + 1);
    return num / a;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

std::vector<std::string> CounterexampleVariant::names() const {
    std::vector<std::string> out;
    if (!quasianalytic && !strong_b) out.push_back("minimal");
    if (quasianalytic) out.push_back("quasianalytic");
    if (strong_b) out.push_back("strong_b");
    return out;
}

CounterexampleVariant CounterexampleVariant::from_names(const std::vector<std::string>& names) {
    CounterexampleVariant v;
    for (const auto& n : names) {
        if (n == "minimal") continue;
        if (n == "quasianalytic")
            v.quasianalytic = true;
        else if (n == "strong_b")
            v.strong_b = true;
        else
            throw InvalidInput("unknown counterexample variant '" + n + "'");
    }
    return v;
}

double PiecewiseLinearLogSpec::f(std::uint64_t p) const {
    if (p > tail_breakpoint) throw RangeError("f evaluated beyond the last breakpoint");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), p);
    const std::size_t j = static_cast<std::size_t>(it - breakpoints.begin()) - 1;  // a_j <= p
    const double slope = j < slopes.size() ? slopes[j] : tail_slope;
    return f_values[j] + slope * static_cast<double>(p - breakpoints[j]);
}

PiecewiseLinearLogSpec build_schedule(std::size_t levels, CounterexampleVariant variant, double b1) {
    if (levels < 4) throw InvalidInput("counterexample needs at least 4 levels");
    if (!(b1 > 0)) throw InvalidInput("counterexample needs b1 > 0");
    PiecewiseLinearLogSpec s;
    s.variant = variant;
    s.breakpoints = {0};
    s.f_values = {0.0};
    // slope index j (1-based) is stored at slopes[j-1]
    std::vector<double> b{b1};
    for (std::size_t j = 1; j <= levels; ++j) {
        const double a = static_cast<double>(s.breakpoints[j - 1]);
        const double fa = s.f_values[j - 1];
        if (j >= 2) b.push_back(std::max(b.back() + 1.0, b_rhs(j, a, fa, variant.strong_b)));
        const double bj = b[j - 1];
        std::uint64_t next = static_cast<std::uint64_t>(j) * (s.breakpoints[j - 1] + 1);
        if (variant.quasianalytic) {
            const double need = std::ceil(bj / static_cast<double>(j) - a);
            if (need > static_cast<double>(next)) next = static_cast<std::uint64_t>(need);
        }
        const double fnext = fa + bj * static_cast<double>(next - s.breakpoints[j - 1]);
        if (!(fnext < 1e300)) throw RangeError("f overflows; reduce the number of levels");
        if (j < levels) {
            s.breakpoints.push_back(next);
            s.f_values.push_back(fnext);
        } else {
            s.tail_breakpoint = next;
        }
    }
    s.slopes.assign(b.begin(), b.end() - 1);
    s.tail_slope = b.back();
    return s;
}

WeightSequence counterexample_sequence(const PiecewiseLinearLogSpec& spec) {
    const std::uint64_t h = std::min(spec.tail_breakpoint, kMaxCounterexampleHorizon);
    std::vector<double> v(h + 1);
    std::size_t j = 0;
    for (std::uint64_t p = 0; p <= h; ++p) {
        while (j + 1 < spec.breakpoints.size() && spec.breakpoints[j + 1] <= p) ++j;
        const double slope = j < spec.slopes.size() ? spec.slopes[j] : spec.tail_slope;
        v[p] = spec.f_values[j] + slope * static_cast<double>(p - spec.breakpoints[j]);
    }
    std::vector<std::size_t> cps;
    for (auto a : spec.breakpoints)
        if (a + 1 <= h) cps.push_back(a + 1);
    std::string label = "N[";
    for (const auto& n : spec.variant.names()) label += n + ",";
    label += "J=" + std::to_string(spec.levels()) + "]";
    if (h < spec.tail_breakpoint) label += "(cut at " + std::to_string(h) + ")";
    return WeightSequence(label, std::move(v), std::move(cps));
}

std::pair<PiecewiseLinearLogSpec, WeightSequence> build_counterexample(std::size_t levels,
                                                                       CounterexampleVariant variant,
                                                                       double b1) {
    auto spec = build_schedule(levels, variant, b1);
    auto n = counterexample_sequence(spec);
    return {std::move(spec), std::move(n)};
}

ConditionReport validate_schedule(const PiecewiseLinearLogSpec& spec) {
    ConditionReport r;
    r.condition = "schedule";
    r.window = "levels 1.." + std::to_string(spec.levels());
    r.verdict = Verdict::HoldsOnHorizon;
    auto fail = [&](std::size_t j, const std::string& why) {
        r.verdict = Verdict::FailsOnHorizon;
        r.witness_index = j;
        r.notes.push_back(why + " at j=" + std::to_string(j));
        return r;
    };
    const std::size_t J = spec.levels();
    if (J < 2 || spec.slopes.size() + 1 != J || spec.f_values.size() != J)
        return fail(0, "inconsistent lengths");
    if (spec.breakpoints[0] != 0) return fail(1, "a_1 != 0");
    if (spec.f_values[0] != 0) return fail(1, "f(a_1) != 0");

    // slopes b_1..b_J with b_J the tail slope when present
    std::vector<double> b = spec.slopes;
    std::vector<std::uint64_t> a = spec.breakpoints;
    std::vector<double> fv = spec.f_values;
    if (spec.tail_breakpoint > spec.breakpoints.back()) {
        b.push_back(spec.tail_slope);
        a.push_back(spec.tail_breakpoint);
        fv.push_back(spec.f_values.back() + spec.tail_slope * static_cast<double>(spec.tail_breakpoint - a[J - 1]));
    }
    for (std::size_t j = 1; j <= b.size(); ++j) {
        const double bj = b[j - 1];
        if (!(bj > 0)) return fail(j, "slope not positive");
        if (j >= 2 && !(bj > b[j - 2])) return fail(j, "slopes not strictly increasing");
        if (j < a.size()) {
            const std::uint64_t aj = a[j - 1], an = a[j];
            if (static_cast<std::uint64_t>(j) * (aj + 1) > an) return fail(j, "j(a_j+1) <= a_{j+1} violated");
            if (spec.variant.quasianalytic && static_cast<double>(an) < bj / static_cast<double>(j) - static_cast<double>(aj))
                return fail(j, "a_{j+1} >= b_j/j - a_j violated");
            if (!close(fv[j], bj * static_cast<double>(an - aj) + fv[j - 1])) return fail(j, "f values inconsistent");
        }
        if (j >= 2 && j <= a.size()) {
            const double rhs = b_rhs(j, static_cast<double>(a[j - 1]), fv[j - 1], spec.variant.strong_b);
            if (bj < rhs * (1 - 1e-12)) return fail(j, spec.variant.strong_b ? "strong b-constraint violated" : "b-constraint violated");
        }
    }
    return r;
}

std::vector<double> witness_divergence(const PiecewiseLinearLogSpec& spec, const WeightSequence& n,
                                       std::size_t d) {
    if (d < 2) throw InvalidInput("witness_divergence needs d >= 2");
    const std::size_t J = spec.levels();
    if (d >= J) throw RangeError("empty level range l = " + std::to_string(d) + ".." + std::to_string(J - 1));
    std::vector<double> out;
    for (std::size_t l = d; l + 1 <= J; ++l) {
        const std::uint64_t p = spec.breakpoints[l - 1] + 1;
        const std::uint64_t dp = d * p;
        if (dp > n.horizon()) throw RangeError("d p beyond the sequence horizon");
        out.push_back(n.log_quotient(p) - n[dp] / static_cast<double>(dp));
    }
    return out;
}

BlockSums quasianalytic_block_sums(const PiecewiseLinearLogSpec& spec) {
    BlockSums s;
    for (std::size_t j = 1; j < spec.levels(); ++j) {
        const double width = static_cast<double>(spec.breakpoints[j] - spec.breakpoints[j - 1]);
        s.displayed += width / spec.slopes[j - 1];
        s.harmonic += 1.0 / static_cast<double>(j);
        s.reciprocal += width * std::exp(-spec.slopes[j - 1]);
    }
    return s;
}

nlohmann::json to_json(const PiecewiseLinearLogSpec& spec) {
    nlohmann::json j;
    j["breakpoints"] = spec.breakpoints;
    j["slopes"] = spec.slopes;
    j["f_values"] = spec.f_values;
    j["tail_slope"] = spec.tail_slope;
    j["tail_breakpoint"] = spec.tail_breakpoint;
    j["variant"] = spec.variant.names();
    return j;
}

PiecewiseLinearLogSpec schedule_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("breakpoints") || !j.contains("slopes"))
        throw InvalidInput("schedule document needs 'breakpoints' and 'slopes'");
    PiecewiseLinearLogSpec s;
    s.breakpoints = j["breakpoints"].get<std::vector<std::uint64_t>>();
    s.slopes = j["slopes"].get<std::vector<double>>();
    if (j.contains("variant")) s.variant = CounterexampleVariant::from_names(j["variant"].get<std::vector<std::string>>());
    if (s.breakpoints.empty() || s.slopes.size() + 1 != s.breakpoints.size())
        throw InvalidInput("need J breakpoints and J-1 slopes");
    if (j.contains("f_values")) {
        s.f_values = j["f_values"].get<std::vector<double>>();
    } else {
        s.f_values = {0.0};
        for (std::size_t k = 1; k < s.breakpoints.size(); ++k)
            s.f_values.push_back(s.f_values.back() +
                                 s.slopes[k - 1] * static_cast<double>(s.breakpoints[k] - s.breakpoints[k - 1]));
    }
    s.tail_slope = j.value("tail_slope", 0.0);
    s.tail_breakpoint = j.value("tail_breakpoint", std::uint64_t{0});
    if (s.tail_breakpoint == 0) s.tail_breakpoint = s.breakpoints.back();
    return s;
}

}  // namespace ultraweight
