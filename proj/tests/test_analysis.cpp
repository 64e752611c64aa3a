#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ultraweight/analysis.hpp"

using namespace ultraweight;
using nlohmann::json;

namespace {

std::vector<std::string> schema_errors(const std::string& doc) {
    try {
        parse_spec(doc);
    } catch (const SchemaError& e) {
        return e.errors();
    }
    return {};
}

bool has_error(const std::vector<std::string>& errs, const std::string& needle) {
    return std::any_of(errs.begin(), errs.end(), [&](const auto& e) { return e.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("schema errors carry json paths") {
    CHECK(has_error(schema_errors(R"({"inputs":[{"family":"nope"}]})"), "$.inputs[0].family: unknown family 'nope'"));
    CHECK(has_error(schema_errors(R"({"inputs":{}})"), "$.inputs"));
    CHECK(has_error(schema_errors(R"({"inputs":[],"conditions":["zz"]})"), "$.conditions[0]"));
    CHECK(has_error(schema_errors(R"({"inputs":[],"bogus":1})"), "bogus"));
    CHECK(has_error(schema_errors(R"({"inputs":[{"log_values":[0,1,3],"horizon":5}]})"), "$.inputs[0]"));
    CHECK(has_error(schema_errors(R"({"inputs":[{"counterexample":{}}]})"), "levels"));
    CHECK(has_error(schema_errors(R"({"inputs":[{"omega_s":0.5}]})"), "$.inputs[0].omega_s"));
    CHECK(has_error(schema_errors(R"({"inputs":[],"options":{"Q":1}})"), "$.options.Q"));
    CHECK(has_error(schema_errors(R"({"inputs":[],"output":{"format":"xml"}})"), "$.output"));
    // every violation is collected, not just the first
    CHECK(schema_errors(R"({"inputs":[{"family":"nope"},{"omega_s":0}],"conditions":["zz"]})").size() >= 3);
    CHECK_THROWS_AS(parse_spec(std::string("{not json")), json::parse_error);
    CHECK_THROWS_AS(parse_spec(std::string("[]")), SchemaError);
}

TEST_CASE("spec round trip") {
    const auto spec = parse_spec(std::string(R"({
        "inputs":[{"family":"gevrey","params":{"s":1}},{"omega_s":2}],
        "conditions":["lc","om1"],"horizon":128,
        "options":{"d_max":4,"grid":[0.5,1,2]},"output":{"format":"csv"}})"));
    CHECK(spec.inputs.size() == 2);
    CHECK(spec.horizon == 128);
    CHECK(spec.options.d_max == 4);
    CHECK(spec.options.grid == std::vector<double>{0.5, 1, 2});
    CHECK(spec.format == "csv");
    const auto again = parse_spec(to_json(spec));
    CHECK(to_json(again) == to_json(spec));
}

TEST_CASE("bundle contents and skipped pairs") {
    const auto spec = parse_spec(std::string(R"({
        "inputs":[{"family":"gevrey","params":{"s":1}},{"family":"gevrey","params":{"s":1}},{"omega_s":2}],
        "conditions":["mg_battery","om1"],"horizon":256})"));
    const auto b = run_analysis(spec);
    REQUIRE(b.labels.size() == 3);
    CHECK(b.labels[1] == b.labels[0] + " #2");
    // the battery expands into its seven items
    CHECK(b.reports.at(b.labels[0]).size() == 8);
    CHECK(b.reports.at(b.labels[0]).at("mg_iv").holds());
    // omega_s has no sequence: mg_battery is skipped there
    CHECK(std::any_of(b.skipped.begin(), b.skipped.end(),
                      [&](const SkippedPair& s) { return s.label == b.labels[2] && s.condition == "mg_battery"; }));
    CHECK(b.reports.at(b.labels[2]).at("om1").holds());

    const auto empty = run_analysis(parse_spec(std::string(R"({"inputs":[{"family":"gevrey","params":{"s":1}}],
        "conditions":[]})")));
    CHECK(empty.size() == 0);
}

TEST_CASE("bundle json round trip and determinism") {
    const auto spec = parse_spec(std::string(R"({
        "inputs":[{"family":"q_gevrey","params":{"q":2,"n":2}},{"counterexample":{"levels":6}}],
        "conditions":["lc","dc","beta1","genmg","schedule"],"horizon":256})"));
    const auto a = run_analysis(spec);
    const auto b = run_analysis(spec);
    const auto ja = emit_report(a, "json");
    CHECK(ja == emit_report(b, "json"));
    const auto back = bundle_from_json(json::parse(ja));
    CHECK(emit_report(back, "json") == ja);
    CHECK(back.labels == a.labels);
    // counterexample genmg carries the witness table
    const auto& n = a.reports.at(a.labels[1]);
    CHECK(n.at("genmg").sub_reports.count("witness_table") == 1);
    CHECK(n.at("schedule").holds());
}

TEST_CASE("numbers are rounded and non-finite values are strings") {
    ConditionReport r;
    r.condition = "x";
    r.verdict = Verdict::FailsOnHorizon;
    r.constants["a"] = 1.0 / 3;
    r.constants["b"] = INFINITY;
    r.witness_series = {{4, NAN}};
    const auto j = to_json(r);
    CHECK(j["constants"]["a"].get<double>() == 0.333333333333);
    CHECK(j["constants"]["b"] == "inf");
    const auto back = report_from_json("x", j);
    CHECK(std::isinf(back.constants.at("b")));
    CHECK(std::isnan(back.witness_series[0].value));
    CHECK(back.verdict == Verdict::FailsOnHorizon);
}

TEST_CASE("csv and plotdata emitters") {
    const auto spec = parse_spec(std::string(R"({
        "inputs":[{"family":"gevrey","params":{"s":1}}],"conditions":["mg_battery"],"horizon":256})"));
    const auto b = run_analysis(spec);
    const auto csv = emit_report(b, "csv");
    CHECK(csv.rfind("label,condition,prefix,value,verdict\n", 0) == 0);
    std::set<std::string> conds;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        // labels with commas are quoted
        const auto start = line[0] == '"' ? line.find("\",") + 2 : line.find(',') + 1;
        conds.insert(line.substr(start, line.find(',', start) - start));
    }
    CHECK(conds.size() == 7);
    CHECK(conds.count("mg_iv") == 1);

    const auto plot = emit_report(b, "plotdata");
    CHECK(plot.find("# " + b.labels[0] + " | mg_ii | HoldsOnHorizon") != std::string::npos);
    CHECK_THROWS_AS(emit_report(b, "xml"), Error);
    CHECK_THROWS_AS(write_report(b, "json", "/nonexistent/dir/out.json"), Error);
}

TEST_CASE("computation errors name the input") {
    const auto spec = parse_spec(std::string(R"({
        "inputs":[{"label":"bumpy","log_values":[0,2,3,4,5,6,7,8,9]}],"conditions":["mg_battery"]})"));
    try {
        run_analysis(spec);
        FAIL("expected a computation error");
    } catch (const ComputationError& e) {
        CHECK(std::string(e.what()).find("bumpy") != std::string::npos);
    }
}
