#include "ultraweight/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <set>
#include <sstream>

#include "ultraweight/assoc.hpp"
#include "ultraweight/conditions.hpp"
#include "ultraweight/counterexample.hpp"
#include "ultraweight/matrix.hpp"
#include "ultraweight/sequence.hpp"

namespace ultraweight {

using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
    std::string out = "invalid analysis spec";
    for (const auto& e : errors) out += "\n  " + e;
    return out;
}

// Condition ids by the kind of object they need.
const std::vector<std::string> kSequenceIds{"lc",    "mg_battery", "dc",      "mualmost", "quasianalytic",
                                            "beta1", "beta3",      "condv",   "gamma1",   "genmg",
                                            "equlemma", "admissibility"};
const std::vector<std::string> kCounterexampleIds{"schedule", "witness_divergence"};
const std::vector<std::string> kMatrixIds{"matrix_mg_R", "matrix_mg_B",      "rstrange",       "bstrange",
                                          "mixed_mg",    "shifted_quotients", "pointwise_order"};
const std::vector<std::string> kOmegaMatrixIds{"quotient_identities", "omega_sandwich", "condv_propagation"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

class Validator {
public:
    std::vector<std::string> errors;

    void error(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

    bool natural(const json& j, const std::string& path, long long min) {
        if (!j.is_number_integer() || j.get<long long>() < min) {
            error(path, "expected an integer >= " + std::to_string(min));
            return false;
        }
        return true;
    }

    bool number(const json& j, const std::string& path) {
        if (!j.is_number()) {
            error(path, "expected a number");
            return false;
        }
        return true;
    }

    void known_keys(const json& j, const std::string& path, const std::set<std::string>& keys) {
        for (auto& [k, v] : j.items())
            if (!keys.count(k)) error(at(path, k), "unknown key '" + k + "'");
    }

    void input(const json& j, const std::string& path) {
        if (!j.is_object()) return error(path, "input must be an object");
        static const std::vector<std::string> kinds{"family", "log_values", "counterexample", "omega_s", "matrix"};
        std::vector<std::string> present;
        for (const auto& k : kinds)
            if (j.contains(k)) present.push_back(k);
        if (present.size() != 1)
            return error(path, "input needs exactly one of family, log_values, counterexample, omega_s, matrix");
        const std::string kind = present.front();
        if (kind == "family") {
            known_keys(j, path, {"family", "params", "horizon"});
            if (!j["family"].is_string()) {
                error(at(path, "family"), "expected a string");
            } else {
                try {
                    family_from_string(j["family"].get<std::string>());
                } catch (const InvalidInput&) {
                    error(at(path, "family"), "unknown family '" + j["family"].get<std::string>() + "'");
                }
            }
            if (j.contains("params")) {
                if (!j["params"].is_object())
                    error(at(path, "params"), "expected an object");
                else
                    for (auto& [k, v] : j["params"].items()) number(v, at(at(path, "params"), k));
            }
            if (j.contains("horizon")) natural(j["horizon"], at(path, "horizon"), 4);
        } else if (kind == "log_values") {
            known_keys(j, path, {"log_values", "label", "checkpoints", "horizon"});
            const auto& v = j["log_values"];
            if (!v.is_array() || v.size() < 5) {
                error(at(path, "log_values"), "expected an array of at least 5 numbers (horizon >= 4)");
            } else {
                for (std::size_t i = 0; i < v.size(); ++i) number(v[i], at(at(path, "log_values"), i));
            }
            if (j.contains("label") && !j["label"].is_string()) error(at(path, "label"), "expected a string");
            if (j.contains("horizon") && natural(j["horizon"], at(path, "horizon"), 4) && v.is_array() &&
                j["horizon"].get<std::size_t>() + 1 != v.size())
                error(at(path, "horizon"), "does not match the number of log values");
            if (j.contains("checkpoints")) {
                if (!j["checkpoints"].is_array())
                    error(at(path, "checkpoints"), "expected an array");
                else
                    for (std::size_t i = 0; i < j["checkpoints"].size(); ++i)
                        natural(j["checkpoints"][i], at(at(path, "checkpoints"), i), 1);
            }
        } else if (kind == "counterexample") {
            known_keys(j, path, {"counterexample"});
            const auto& c = j["counterexample"];
            const std::string p = at(path, "counterexample");
            if (!c.is_object()) return error(p, "expected an object");
            known_keys(c, p, {"levels", "variant", "b1"});
            if (!c.contains("levels"))
                error(at(p, "levels"), "missing");
            else
                natural(c["levels"], at(p, "levels"), 4);
            if (c.contains("variant")) {
                if (!c["variant"].is_array()) {
                    error(at(p, "variant"), "expected an array of strings");
                } else {
                    for (std::size_t i = 0; i < c["variant"].size(); ++i) {
                        const auto& n = c["variant"][i];
                        if (!n.is_string() || (n != "minimal" && n != "quasianalytic" && n != "strong_b"))
                            error(at(at(p, "variant"), i), "unknown variant " + n.dump());
                    }
                }
            }
            if (c.contains("b1") && number(c["b1"], at(p, "b1")) && !(c["b1"].get<double>() > 0))
                error(at(p, "b1"), "expected b1 > 0");
        } else if (kind == "omega_s") {
            known_keys(j, path, {"omega_s", "log_range"});
            if (number(j["omega_s"], at(path, "omega_s")) && !(j["omega_s"].get<double>() > 1))
                error(at(path, "omega_s"), "expected s > 1");
            if (j.contains("log_range") && number(j["log_range"], at(path, "log_range")) &&
                !(j["log_range"].get<double>() > 0))
                error(at(path, "log_range"), "expected a positive number");
        } else {
            known_keys(j, path, {"matrix", "label"});
            if (!j["matrix"].is_object() || !j["matrix"].contains("members") || !j["matrix"]["members"].is_object())
                error(at(path, "matrix"), "expected an object with a 'members' object");
            if (j.contains("label") && !j["label"].is_string()) error(at(path, "label"), "expected a string");
        }
    }

    void options(const json& j, const std::string& path, AnalysisOptions& o) {
        if (!j.is_object()) return error(path, "expected an object");
        known_keys(j, path, {"d_max", "grid", "Q", "beta", "x", "c", "max_pq"});
        if (j.contains("d_max") && natural(j["d_max"], at(path, "d_max"), 1)) o.d_max = j["d_max"];
        if (j.contains("Q") && natural(j["Q"], at(path, "Q"), 2)) o.Q = j["Q"];
        if (j.contains("c") && natural(j["c"], at(path, "c"), 1)) o.c = j["c"];
        if (j.contains("max_pq") && natural(j["max_pq"], at(path, "max_pq"), 2)) o.max_pq = j["max_pq"];
        if (j.contains("beta") && number(j["beta"], at(path, "beta"))) {
            if (j["beta"].get<double>() < 0)
                error(at(path, "beta"), "expected beta >= 0");
            else
                o.beta = j["beta"];
        }
        if (j.contains("x") && number(j["x"], at(path, "x"))) {
            if (!(j["x"].get<double>() > 0))
                error(at(path, "x"), "expected x > 0");
            else
                o.x = j["x"];
        }
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            if (!g.is_array() || g.empty()) return error(at(path, "grid"), "expected a nonempty array of numbers");
            o.grid.clear();
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!number(g[i], at(at(path, "grid"), i))) continue;
                if (!(g[i].get<double>() > 0))
                    error(at(at(path, "grid"), i), "expected a positive index");
                else
                    o.grid.push_back(g[i]);
            }
        }
    }
};

// ---------------------------------------------------------------------------
// prepared inputs

enum class InputKind { Sequence, OmegaS, Matrix };

struct Prepared {
    std::string label;
    InputKind kind = InputKind::Sequence;
    std::optional<WeightSequence> seq;
    std::optional<PiecewiseLinearLogSpec> schedule;
    std::optional<WeightFunctionHandle> handle;
    std::optional<WeightMatrix> matrix;
};

std::size_t horizon_of(const json& input, const std::optional<std::size_t>& override_h) {
    if (override_h) return *override_h;
    return input.value("horizon", kDefaultHorizon);
}

WeightSequence apply_override(WeightSequence s, const std::optional<std::size_t>& h) {
    if (!h || *h == s.horizon()) return s;
    if (*h > s.horizon())
        throw InvalidInput("horizon override " + std::to_string(*h) + " exceeds the input horizon " +
                           std::to_string(s.horizon()));
    return s.truncated(*h);
}

Prepared prepare(const json& input, const AnalysisSpec& spec, bool need_matrix, bool need_handle) {
    Prepared p;
    if (input.contains("family")) {
        json j = input;
        j["horizon"] = horizon_of(input, spec.horizon);
        p.seq = sequence_from_json(j);
    } else if (input.contains("log_values")) {
        p.seq = apply_override(sequence_from_json(input), spec.horizon);
    } else if (input.contains("counterexample")) {
        const auto& c = input["counterexample"];
        CounterexampleVariant v;
        if (c.contains("variant")) v = CounterexampleVariant::from_names(c["variant"].get<std::vector<std::string>>());
        auto [schedule, n] = build_counterexample(c["levels"].get<std::size_t>(), v, c.value("b1", 1.0));
        p.schedule = std::move(schedule);
        p.seq = apply_override(std::move(n), spec.horizon);
    } else if (input.contains("omega_s")) {
        p.kind = InputKind::OmegaS;
        p.handle = WeightFunctionHandle::omega_s(input["omega_s"].get<double>(), input.value("log_range", 1e4));
    } else {
        p.kind = InputKind::Matrix;
        p.matrix = matrix_from_json(input["matrix"]);
        p.label = input.value("label", std::string("matrix"));
        return p;
    }
    if (p.seq) {
        p.label = p.seq->label();
        if (need_handle || need_matrix) p.handle = WeightFunctionHandle::associated(*p.seq);
    } else {
        p.label = p.handle->label();
    }
    if (need_matrix) {
        const auto grid = spec.options.grid.empty() ? dyadic_grid() : spec.options.grid;
        const std::size_t h = p.seq ? p.seq->horizon() : horizon_of(input, spec.horizon);
        p.matrix = build_associated_matrix(*p.handle, grid, h);
    }
    return p;
}

std::optional<std::string> not_applicable(const Prepared& p, const std::string& id) {
    const bool weight_id = weight_condition_ids().count(id) > 0;
    if (contains(kSequenceIds, id) && !p.seq) return "needs a weight sequence";
    if (contains(kCounterexampleIds, id) && !p.schedule) return "needs a counterexample input";
    if (weight_id && p.kind == InputKind::Matrix) return "needs a weight function";
    if (contains(kOmegaMatrixIds, id) && p.kind == InputKind::Matrix) return "needs a matrix built from a weight";
    return std::nullopt;
}

bool is_matrix_id(const std::string& id) { return contains(kMatrixIds, id) || contains(kOmegaMatrixIds, id); }

using ReportMap = std::map<std::string, ConditionReport>;

ReportMap single(ConditionReport r, const std::string& key) {
    r.condition = key;
    return ReportMap{{key, std::move(r)}};
}

ConditionReport witness_table(const PiecewiseLinearLogSpec& s, const WeightSequence& n, std::size_t d_max) {
    ConditionReport r;
    r.condition = "witness_divergence";
    const std::size_t J = s.levels();
    std::size_t holds = 0, fails = 0;
    for (std::size_t d = 2; d <= d_max && d < J; ++d) {
        ConditionReport sub;
        sub.condition = "witness_divergence";
        std::vector<double> w;
        try {
            w = witness_divergence(s, n, d);
        } catch (const RangeError& e) {
            r.notes.push_back("d=" + std::to_string(d) + ": " + e.what());
            continue;
        }
        double worst = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double l = static_cast<double>(d + k);
            sub.witness_series.push_back({l, w[k]});
            worst = std::max(worst, std::abs(w[k] - l * l / static_cast<double>(d)));
        }
        sub.constants["d"] = static_cast<double>(d);
        sub.constants["max_error_vs_l2_over_d"] = worst;
        sub.window = "levels l = " + std::to_string(d) + ".." + std::to_string(J - 1) + ", p = a_l + 1";
        sub.verdict = series_verdict(sub.witness_series);
        holds += sub.holds();
        fails += sub.fails();
        r.sub_reports["d=" + std::to_string(d)] = std::move(sub);
    }
    const std::size_t n_sub = r.sub_reports.size();
    r.verdict = n_sub > 0 && fails == n_sub   ? Verdict::FailsOnHorizon
                : n_sub > 0 && holds == n_sub ? Verdict::HoldsOnHorizon
                                              : Verdict::Inconclusive;
    r.window = "d = 2.." + std::to_string(std::min(d_max, J - 1));
    return r;
}

ConditionReport level_sweep(const WeightMatrix& m, MatrixVariant v) {
    ConditionReport r;
    r.condition = "matrix_mg_" + to_string(v);
    std::set<Verdict> seen;
    for (auto l : {MgLevel::I, MgLevel::II, MgLevel::III, MgLevel::IV, MgLevel::V}) {
        auto sub = matrix_mg(m, v, l);
        seen.insert(sub.verdict);
        r.sub_reports[to_string(l)] = std::move(sub);
    }
    if (seen.size() == 1) {
        r.verdict = *seen.begin();
    } else {
        r.verdict = Verdict::Inconclusive;
        r.notes.push_back("levels I-V disagree");
    }
    r.window = "levels I-V";
    return r;
}

ReportMap evaluate(const Prepared& p, const std::string& id, const AnalysisOptions& o) {
    if (id == "lc") return single(validate_lc(*p.seq), id);
    if (id == "mg_battery") return mg_battery(*p.seq);
    if (id == "dc" || id == "mualmost" || id == "quasianalytic") return single(growth_flags(*p.seq).at(id), id);
    if (id == "beta1" || id == "beta3" || id == "condv" || id == "gamma1")
        return single(beta_gamma(*p.seq, o.Q, o.beta).at(id), id);
    if (id == "genmg") {
        auto r = moderate_growth_index(*p.seq, o.d_max);
        if (p.schedule) r.sub_reports["witness_table"] = witness_table(*p.schedule, *p.seq, o.d_max);
        return single(std::move(r), id);
    }
    if (id == "equlemma") {
        ConditionReport r;
        std::size_t holds = 0, fails = 0;
        for (std::size_t d = 1; d <= o.d_max && p.seq->horizon() / d >= 2; ++d) {
            auto sub = equlemma_check(*p.seq, d, false);
            if (sub.holds() && !holds) r.constants["d"] = static_cast<double>(d);
            holds += sub.holds();
            fails += sub.fails();
            r.sub_reports["d=" + std::to_string(d)] = std::move(sub);
        }
        const std::size_t n = r.sub_reports.size();
        r.verdict = holds ? Verdict::HoldsOnHorizon : fails == n ? Verdict::FailsOnHorizon : Verdict::Inconclusive;
        r.window = "d = 1.." + std::to_string(n) + ", C in {1, 2, 4, 8}";
        return single(std::move(r), id);
    }
    if (id == "admissibility") return single(admissibility_bundle(*p.seq, o.d_max), id);
    if (id == "schedule") return single(validate_schedule(*p.schedule), id);
    if (id == "witness_divergence") return single(witness_table(*p.schedule, *p.seq, o.d_max), id);
    if (weight_condition_ids().count(id)) return check_weight_conditions(*p.handle, {id});

    const WeightMatrix& m = *p.matrix;
    if (id == "matrix_mg_R") return single(level_sweep(m, MatrixVariant::R), id);
    if (id == "matrix_mg_B") return single(level_sweep(m, MatrixVariant::B), id);
    if (id == "rstrange") return single(quotient_root_comparison(m, MatrixVariant::R, o.d_max), id);
    if (id == "bstrange") return single(quotient_root_comparison(m, MatrixVariant::B, o.d_max), id);
    if (id == "mixed_mg") return single(mixed_mg_check(m, o.max_pq), id);
    if (id == "shifted_quotients") return single(shifted_quotient_check(m, o.max_pq), id);
    if (id == "pointwise_order") return single(pointwise_order_check(m, true), id);
    if (id == "quotient_identities") return single(quotient_identity_suite(m, o.c), id);
    if (id == "omega_sandwich") return single(omega_sandwich_check(m), id);
    if (id == "condv_propagation") return single(condv_propagation(m, o.x, o.c, o.Q, o.beta), id);
    throw InvalidInput("unknown condition id '" + id + "'");
}

// ---------------------------------------------------------------------------
// serialization helpers

json real(double v) {
    if (std::isfinite(v)) return round_sig12(v);
    return format_real(v);
}

double real_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
    throw InvalidInput("bad real value '" + s + "'");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void csv_rows(std::ostringstream& os, const std::string& label, const std::string& condition,
              const ConditionReport& r) {
    const std::string verdict = to_string(r.verdict);
    if (r.witness_series.empty())
        os << csv_field(label) << ',' << csv_field(condition) << ",,," << verdict << '\n';
    for (const auto& pt : r.witness_series)
        os << csv_field(label) << ',' << csv_field(condition) << ',' << format_real(pt.prefix) << ','
           << format_real(pt.value) << ',' << verdict << '\n';
    for (const auto& [k, sub] : r.sub_reports) csv_rows(os, label, condition + "/" + k, sub);
}

void plot_blocks(std::ostringstream& os, const std::string& label, const std::string& condition,
                 const ConditionReport& r) {
    if (!r.witness_series.empty()) {
        os << "# " << label << " | " << condition << " | " << to_string(r.verdict) << '\n';
        for (const auto& pt : r.witness_series) os << format_real(pt.prefix) << ' ' << format_real(pt.value) << '\n';
        os << "\n\n";
    }
    for (const auto& [k, sub] : r.sub_reports) plot_blocks(os, label, condition + "/" + k, sub);
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> errors) : Error(join_errors(errors)), errors_(std::move(errors)) {}

const std::vector<std::string>& condition_registry() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto* v : {&kSequenceIds, &kCounterexampleIds, &kMatrixIds, &kOmegaMatrixIds})
            out.insert(out.end(), v->begin(), v->end());
        out.insert(out.end(), weight_condition_ids().begin(), weight_condition_ids().end());
        return out;
    }();
    return ids;
}

AnalysisSpec parse_spec(const std::string& document) { return parse_spec(json::parse(document)); }

AnalysisSpec parse_spec(const json& doc) {
    Validator v;
    AnalysisSpec spec;
    if (!doc.is_object()) throw SchemaError({"$: spec must be an object"});
    v.known_keys(doc, "$", {"inputs", "conditions", "horizon", "options", "output"});
    if (!doc.contains("inputs") || !doc["inputs"].is_array()) {
        v.error("$.inputs", "expected an array");
    } else {
        for (std::size_t i = 0; i < doc["inputs"].size(); ++i) {
            v.input(doc["inputs"][i], at("$.inputs", i));
            spec.inputs.push_back(doc["inputs"][i]);
        }
    }
    if (doc.contains("conditions")) {
        const auto& c = doc["conditions"];
        if (!c.is_array()) {
            v.error("$.conditions", "expected an array of condition ids");
        } else {
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (!c[i].is_string() || !contains(condition_registry(), c[i].get<std::string>())) {
                    v.error(at("$.conditions", i), "unknown condition id " + c[i].dump());
                    continue;
                }
                if (!contains(spec.conditions, c[i].get<std::string>())) spec.conditions.push_back(c[i]);
            }
        }
    }
    if (doc.contains("horizon") && v.natural(doc["horizon"], "$.horizon", 4)) spec.horizon = doc["horizon"];
    if (doc.contains("options")) v.options(doc["options"], "$.options", spec.options);
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        if (!o.is_object()) {
            v.error("$.output", "expected an object");
        } else {
            v.known_keys(o, "$.output", {"format", "path"});
            if (o.contains("format")) {
                if (!o["format"].is_string() ||
                    (o["format"] != "json" && o["format"] != "csv" && o["format"] != "plotdata"))
                    v.error("$.output.format", "expected one of json, csv, plotdata");
                else
                    spec.format = o["format"];
            }
            if (o.contains("path")) {
                if (!o["path"].is_string())
                    v.error("$.output.path", "expected a string");
                else
                    spec.path = o["path"];
            }
        }
    }
    if (!v.errors.empty()) throw SchemaError(v.errors);
    return spec;
}

json to_json(const AnalysisSpec& spec) {
    json j;
    j["inputs"] = spec.inputs;
    j["conditions"] = spec.conditions;
    if (spec.horizon) j["horizon"] = *spec.horizon;
    const auto& o = spec.options;
    json opt{{"d_max", o.d_max}, {"Q", o.Q}, {"beta", o.beta}, {"x", o.x}, {"c", o.c}, {"max_pq", o.max_pq}};
    if (!o.grid.empty()) opt["grid"] = o.grid;
    j["options"] = opt;
    j["output"] = {{"format", spec.format}, {"path", spec.path}};
    return j;
}

std::size_t ReportBundle::size() const {
    std::size_t n = 0;
    for (const auto& [label, m] : reports) n += m.size();
    return n;
}

ReportBundle run_analysis(const AnalysisSpec& spec) {
    const bool need_matrix = std::any_of(spec.conditions.begin(), spec.conditions.end(), is_matrix_id);
    const bool need_handle = std::any_of(spec.conditions.begin(), spec.conditions.end(),
                                         [](const std::string& id) { return weight_condition_ids().count(id) > 0; });

    std::vector<std::future<Prepared>> staged;
    for (const auto& input : spec.inputs)
        staged.push_back(std::async(std::launch::async, [&input, &spec, need_matrix, need_handle] {
            return prepare(input, spec, need_matrix, need_handle);
        }));
    std::vector<Prepared> prepared;
    for (std::size_t i = 0; i < staged.size(); ++i) {
        try {
            prepared.push_back(staged[i].get());
        } catch (const Error& e) {
            throw ComputationError("input " + std::to_string(i) + ": " + e.what());
        } catch (const nlohmann::json::exception& e) {
            throw ComputationError("input " + std::to_string(i) + ": " + e.what());
        }
    }

    ReportBundle bundle;
    std::map<std::string, int> seen;
    for (auto& p : prepared) {
        const int k = ++seen[p.label];
        if (k > 1) p.label += " #" + std::to_string(k);
        bundle.labels.push_back(p.label);
    }

    struct Task {
        const Prepared* input;
        std::string id;
        std::future<ReportMap> result;
    };
    std::vector<Task> tasks;
    for (const auto& p : prepared) {
        for (const auto& id : spec.conditions) {
            if (auto why = not_applicable(p, id)) {
                bundle.skipped.push_back({p.label, id, *why});
                continue;
            }
            const Prepared* pp = &p;
            tasks.push_back({pp, id, std::async(std::launch::async, [pp, id, &spec] {
                                 return evaluate(*pp, id, spec.options);
                             })});
        }
    }
    for (auto& t : tasks) {
        ReportMap m;
        try {
            m = t.result.get();
        } catch (const Error& e) {
            throw ComputationError(t.input->label + " / " + t.id + ": " + e.what());
        }
        auto& dst = bundle.reports[t.input->label];
        for (auto& [k, r] : m) dst[k] = std::move(r);
    }
    return bundle;
}

json to_json(const ConditionReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    json constants = json::object();
    for (const auto& [k, v] : r.constants) constants[k] = real(v);
    j["constants"] = constants;
    json series = json::array();
    for (const auto& pt : r.witness_series) series.push_back({real(pt.prefix), real(pt.value)});
    j["witness_series"] = series;
    j["witness_index"] = r.witness_index ? json(*r.witness_index) : json(nullptr);
    j["window"] = r.window;
    j["notes"] = r.notes;
    json subs = json::object();
    for (const auto& [k, sub] : r.sub_reports) subs[k] = to_json(sub);
    j["sub_reports"] = subs;
    j["condition"] = r.condition;
    return j;
}

ConditionReport report_from_json(const std::string& condition, const json& j) {
    ConditionReport r;
    r.condition = j.value("condition", condition);
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    if (j.contains("constants"))
        for (auto& [k, v] : j["constants"].items()) r.constants[k] = real_from(v);
    if (j.contains("witness_series"))
        for (const auto& pt : j["witness_series"]) r.witness_series.push_back({real_from(pt.at(0)), real_from(pt.at(1))});
    if (j.contains("witness_index") && !j["witness_index"].is_null()) r.witness_index = j["witness_index"].get<std::size_t>();
    r.window = j.value("window", std::string());
    if (j.contains("notes")) r.notes = j["notes"].get<std::vector<std::string>>();
    if (j.contains("sub_reports"))
        for (auto& [k, v] : j["sub_reports"].items()) r.sub_reports[k] = report_from_json(k, v);
    return r;
}

json to_json(const ReportBundle& b) {
    json j;
    j["inputs"] = b.labels;
    json reports = json::object();
    for (const auto& label : b.labels) {
        json per = json::object();
        auto it = b.reports.find(label);
        if (it != b.reports.end())
            for (const auto& [k, r] : it->second) per[k] = to_json(r);
        reports[label] = per;
    }
    j["reports"] = reports;
    json skipped = json::array();
    for (const auto& s : b.skipped)
        skipped.push_back({{"label", s.label}, {"condition", s.condition}, {"reason", s.reason}});
    j["skipped"] = skipped;
    return j;
}

ReportBundle bundle_from_json(const json& j) {
    if (!j.is_object() || !j.contains("reports") || !j["reports"].is_object())
        throw InvalidInput("bundle document needs a 'reports' object");
    ReportBundle b;
    if (j.contains("inputs")) {
        b.labels = j["inputs"].get<std::vector<std::string>>();
    } else {
        for (auto& [label, v] : j["reports"].items()) b.labels.push_back(label);
    }
    for (auto& [label, per] : j["reports"].items())
        for (auto& [k, r] : per.items()) b.reports[label][k] = report_from_json(k, r);
    if (j.contains("skipped"))
        for (const auto& s : j["skipped"])
            b.skipped.push_back({s.at("label"), s.at("condition"), s.value("reason", std::string())});
    return b;
}

std::string emit_report(const ReportBundle& b, const std::string& format) {
    if (format == "json") return to_json(b).dump(2) + "\n";
    if (format != "csv" && format != "plotdata") throw InvalidInput("unknown format '" + format + "'");
    if (b.size() == 0) throw InvalidInput(format + " output needs a nonempty bundle");
    std::ostringstream os;
    if (format == "csv") os << "label,condition,prefix,value,verdict\n";
    for (const auto& label : b.labels) {
        auto it = b.reports.find(label);
        if (it == b.reports.end()) continue;
        for (const auto& [k, r] : it->second) {
            if (format == "csv")
                csv_rows(os, label, k, r);
            else
                plot_blocks(os, label, k, r);
        }
    }
    return os.str();
}

void write_report(const ReportBundle& b, const std::string& format, const std::string& path) {
    const auto text = emit_report(b, format);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace ultraweight
