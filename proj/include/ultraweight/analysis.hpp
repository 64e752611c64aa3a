#pragma once

// Batch analysis: a JSON spec names inputs and condition ids; the run
// produces a bundle of reports keyed by (input label, condition id) that
// serializes byte-identically across runs.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ultraweight/report.hpp"

namespace ultraweight {

/// Schema violations, each prefixed with the JSON path it refers to.
class SchemaError : public Error {
public:
    explicit SchemaError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

/// A module error annotated with the input it came from.
class ComputationError : public Error {
public:
    using Error::Error;
};

/// Every condition id accepted in a spec.
const std::vector<std::string>& condition_registry();

struct AnalysisOptions {
    std::size_t d_max = 8;
    std::vector<double> grid;  // empty: dyadic 2^-4 .. 2^4
    std::size_t Q = 2;
    double beta = 1;
    double x = 1;              // condv_propagation base index
    std::size_t c = 2;
    std::size_t max_pq = 64;   // mixed_mg, shifted_quotients
};

struct AnalysisSpec {
    /// Validated input objects: {"family","params","horizon"},
    /// {"label","log_values"}, {"counterexample":{...}}, {"omega_s": s}
    /// or {"matrix": {...}}.
    std::vector<nlohmann::json> inputs;
    std::vector<std::string> conditions;
    std::optional<std::size_t> horizon;
    AnalysisOptions options;
    std::string format = "json";
    std::string path;  // empty: standard output
};

/// Throws nlohmann::json::parse_error on malformed text and SchemaError on
/// schema violations.
AnalysisSpec parse_spec(const std::string& document);
AnalysisSpec parse_spec(const nlohmann::json& document);
nlohmann::json to_json(const AnalysisSpec& spec);

struct SkippedPair {
    std::string label;
    std::string condition;
    std::string reason;
};

struct ReportBundle {
    std::vector<std::string> labels;  // input order
    std::map<std::string, std::map<std::string, ConditionReport>> reports;
    std::vector<SkippedPair> skipped;

    std::size_t size() const;
};

/// Independent (input, condition) pairs run concurrently; assembly is ordered.
/// Conditions that do not apply to an input kind are listed in `skipped`.
ReportBundle run_analysis(const AnalysisSpec& spec);

nlohmann::json to_json(const ConditionReport& r);
ConditionReport report_from_json(const std::string& condition, const nlohmann::json& j);
nlohmann::json to_json(const ReportBundle& b);
ReportBundle bundle_from_json(const nlohmann::json& j);

/// "json", "csv" (label,condition,prefix,value,verdict) or "plotdata"
/// (one two-column block per witness series). Sub-reports appear as
/// "condition/key".
std::string emit_report(const ReportBundle& b, const std::string& format);
/// Writes emit_report to `path`; throws Error when the file cannot be written.
void write_report(const ReportBundle& b, const std::string& format, const std::string& path);

}  // namespace ultraweight
