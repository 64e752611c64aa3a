#include "ultraweight/sequence.hpp"

#include <algorithm>
#include <cmath>

namespace ultraweight {

namespace {

double roundoff_tolerance(double magnitude) { return 1e-12 * std::max(1.0, std::abs(magnitude)); }

bool compute_log_convex(const std::vector<double>& v) {
    for (std::size_t p = 1; p + 1 < v.size(); ++p) {
        const double lhs = v[p] - v[p - 1];
        const double rhs = v[p + 1] - v[p];
        if (rhs < lhs - roundoff_tolerance(v[p + 1])) return false;
    }
    return true;
}

double param(const ParamMap& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw InvalidInput("missing parameter '" + key + "'");
    return it->second;
}

}  // namespace

double log_factorial(std::size_t p) { return std::lgamma(static_cast<double>(p) + 1.0); }

WeightSequence::WeightSequence(std::string label, std::vector<double> log_values,
                               std::vector<std::size_t> checkpoints)
    : label_(std::move(label)), log_values_(std::move(log_values)), checkpoints_(std::move(checkpoints)) {
    if (log_values_.size() < 3) throw InvalidInput("weight sequence needs horizon >= 2");
    if (log_values_[0] != 0.0) throw InvalidInput("weight sequence needs M_0 = 1 (log value 0)");
    for (double v : log_values_)
        if (!std::isfinite(v)) throw InvalidInput("weight sequence '" + label_ + "' has a non-finite entry");
    std::sort(checkpoints_.begin(), checkpoints_.end());
    checkpoints_.erase(std::unique(checkpoints_.begin(), checkpoints_.end()), checkpoints_.end());
    log_convex_ = compute_log_convex(log_values_);
}

WeightSequence WeightSequence::with_label(std::string label) const {
    WeightSequence out = *this;
    out.label_ = std::move(label);
    return out;
}

WeightSequence WeightSequence::truncated(std::size_t horizon) const {
    if (horizon < 2 || horizon > this->horizon()) throw RangeError("truncation horizon out of range");
    std::vector<std::size_t> cps;
    for (auto c : checkpoints_)
        if (c <= horizon) cps.push_back(c);
    return WeightSequence(label_, {log_values_.begin(), log_values_.begin() + horizon + 1}, cps);
}

std::vector<double> QuotientView::recompose() const {
    std::vector<double> out(log_quotients.size(), 0.0);
    double sum = 0.0, carry = 0.0;
    for (std::size_t p = 1; p < log_quotients.size(); ++p) {
        const double y = log_quotients[p] - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        out[p] = sum;
    }
    return out;
}

Family family_from_string(const std::string& name) {
    if (name == "gevrey") return Family::Gevrey;
    if (name == "q_gevrey") return Family::QGevrey;
    if (name == "double_exp") return Family::DoubleExp;
    if (name == "constant_one") return Family::ConstantOne;
    throw InvalidInput("unknown family '" + name + "'");
}

std::string to_string(Family f) {
    switch (f) {
    case Family::Gevrey: return "gevrey";
    case Family::QGevrey: return "q_gevrey";
    case Family::DoubleExp: return "double_exp";
    case Family::ConstantOne: return "constant_one";
    }
    return "";
}

WeightSequence make_family(Family family, const ParamMap& params, std::size_t horizon) {
    if (horizon < 2) throw InvalidInput("horizon must be >= 2");
    std::vector<double> v(horizon + 1, 0.0);
    std::string label = to_string(family);
    switch (family) {
    case Family::Gevrey: {
        const double s = param(params, "s");
        if (!(s > 0)) throw InvalidInput("gevrey needs s > 0");
        for (std::size_t p = 1; p <= horizon; ++p) v[p] = s * log_factorial(p);
        label += "(s=" + nlohmann::json(s).dump() + ")";
        break;
    }
    case Family::QGevrey: {
        const double q = param(params, "q");
        const double n = param(params, "n");
        if (!(q > 1)) throw InvalidInput("q_gevrey needs q > 1");
        if (!(n >= 2) || n != std::floor(n)) throw InvalidInput("q_gevrey needs an integer n >= 2");
        const double lq = std::log(q);
        for (std::size_t p = 1; p <= horizon; ++p) v[p] = std::pow(static_cast<double>(p), n) * lq;
        label += "(q=" + nlohmann::json(q).dump() + ",n=" + nlohmann::json(n).dump() + ")";
        break;
    }
    case Family::DoubleExp:
        if (horizon > 700) throw InvalidInput("double_exp horizon must be <= 700");
        for (std::size_t p = 1; p <= horizon; ++p) v[p] = std::exp(static_cast<double>(p));
        break;
    case Family::ConstantOne:
        break;
    }
    return WeightSequence(label, std::move(v));
}

WeightSequence make_family(const std::string& family, const ParamMap& params, std::size_t horizon) {
    return make_family(family_from_string(family), params, horizon);
}

QuotientView quotients(const WeightSequence& m) {
    QuotientView q;
    q.log_quotients.resize(m.horizon() + 1);
    for (std::size_t p = 0; p <= m.horizon(); ++p) q.log_quotients[p] = m.log_quotient(p);
    return q;
}

WeightSequence pi_transform(const WeightSequence& m, double s) {
    std::vector<double> v(m.log_values().begin(), m.log_values().end());
    if (s != 0.0)
        for (std::size_t p = 1; p < v.size(); ++p) v[p] += s * log_factorial(p);
    std::string label = s == 0.0 ? m.label() : "pi^" + nlohmann::json(s).dump() + "(" + m.label() + ")";
    return WeightSequence(label, std::move(v), m.checkpoints());
}

ConditionReport validate_lc(const WeightSequence& m) {
    ConditionReport r;
    r.condition = "LC";
    const std::size_t P = m.horizon();
    r.window = "roots strictly increasing on [" + std::to_string(P / 2) + "," + std::to_string(P) + "]";
    r.verdict = Verdict::HoldsOnHorizon;

    auto fail = [&](std::size_t index, std::string why) {
        r.verdict = Verdict::FailsOnHorizon;
        r.witness_index = index;
        r.notes.push_back(std::move(why));
    };
    if (!m.is_normalized()) {
        fail(1, "not normalized: M_1 < 1");
        return r;
    }
    for (std::size_t p = 1; p < P; ++p) {
        if (m.log_quotient(p + 1) < m.log_quotient(p) - roundoff_tolerance(m[p + 1])) {
            fail(p + 1, "quotients decrease at p=" + std::to_string(p + 1));
            return r;
        }
    }
    const std::size_t start = std::max<std::size_t>(1, P / 2);
    for (std::size_t p = start; p < P; ++p) {
        const double now = m[p] / static_cast<double>(p);
        const double next = m[p + 1] / static_cast<double>(p + 1);
        r.witness_series.push_back({static_cast<double>(p), now});
        if (!(next > now)) {
            fail(p + 1, "roots do not increase at p=" + std::to_string(p + 1));
            return r;
        }
    }
    return r;
}

std::vector<std::size_t> shared_checkpoints(const WeightSequence& a, const WeightSequence& b,
                                            std::size_t range) {
    auto count = [range](const WeightSequence& s) {
        return std::count_if(s.checkpoints().begin(), s.checkpoints().end(),
                             [range](std::size_t c) { return c >= 4 && c <= range; });
    };
    return count(b) > count(a) ? b.checkpoints() : a.checkpoints();
}

ConditionReport compare(const WeightSequence& m, const WeightSequence& n) {
    if (m.horizon() != n.horizon())
        throw InvalidInput("compare: horizon mismatch (" + std::to_string(m.horizon()) + " vs " +
                           std::to_string(n.horizon()) + ")");
    const std::size_t P = m.horizon();
    std::vector<double> terms(P);
    for (std::size_t p = 1; p <= P; ++p) terms[p - 1] = (m[p] - n[p]) / static_cast<double>(p);

    ConditionReport r;
    r.condition = "preceq";
    const auto cps = shared_checkpoints(m, n, P);
    const auto schedule = prefix_schedule(P, cps);
    r.window = schedule_description(schedule, schedule_uses_checkpoints(P, cps));
    r.witness_series = running_max_series(terms, schedule);
    r.verdict = series_verdict(r.witness_series);
    r.constants["log_C"] = r.witness_series.empty() ? 0.0 : r.witness_series.back().value;
    return r;
}

nlohmann::json to_json(const WeightSequence& m) {
    nlohmann::json j;
    j["label"] = m.label();
    j["horizon"] = m.horizon();
    j["log_values"] = std::vector<double>(m.log_values().begin(), m.log_values().end());
    if (!m.checkpoints().empty()) j["checkpoints"] = m.checkpoints();
    return j;
}

WeightSequence sequence_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidInput("sequence document must be an object");
    if (j.contains("family")) {
        ParamMap params;
        if (j.contains("params")) {
            if (!j["params"].is_object()) throw InvalidInput("params must be an object");
            for (auto& [k, v] : j["params"].items()) {
                if (!v.is_number()) throw InvalidInput("parameter '" + k + "' must be a number");
                params[k] = v.get<double>();
            }
        }
        std::size_t horizon = kDefaultHorizon;
        if (j.contains("horizon")) {
            if (!j["horizon"].is_number_integer() || j["horizon"].get<long long>() < 2)
                throw InvalidInput("bad horizon");
            horizon = j["horizon"].get<std::size_t>();
        }
        if (!j["family"].is_string()) throw InvalidInput("family must be a string");
        return make_family(j["family"].get<std::string>(), params, horizon);
    }
    if (!j.contains("log_values") || !j["log_values"].is_array())
        throw InvalidInput("sequence document needs 'family' or 'log_values'");
    auto values = j["log_values"].get<std::vector<double>>();
    if (j.contains("horizon") && j["horizon"].get<std::size_t>() + 1 != values.size())
        throw InvalidInput("horizon does not match log_values length");
    std::vector<std::size_t> cps;
    if (j.contains("checkpoints")) cps = j["checkpoints"].get<std::vector<std::size_t>>();
    return WeightSequence(j.value("label", std::string("sequence")), std::move(values), std::move(cps));
}

}  // namespace ultraweight
