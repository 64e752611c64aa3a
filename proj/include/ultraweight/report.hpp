#pragma once

// Verdict-with-witness reports shared by every checker.
//
// All constants are stored as natural logarithms (log C, log A, log H, ...):
// the constants attached to fast-growing sequences overflow any linear-scale
// double long before the horizon does.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ultraweight {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the range on which a quantity is computed exactly.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A malformed input (unknown family, bad parameter, mismatched horizons ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

enum class Verdict { HoldsOnHorizon, FailsOnHorizon, Inconclusive };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerances of the finite-horizon decision convention.
struct SeriesConvention {
    static constexpr double plateau = 1e-6;  // relative, on the linear constant
    static constexpr double growth = 1e-3;   // relative, per prefix step
    static constexpr double decay = 0.75;    // geometric shrink factor of increments
};

/// One point of a witness series: the prefix (index bound, or a t-bound for
/// weight-function conditions) and the log of the prefix-optimal constant.
struct SeriesPoint {
    double prefix = 0;
    double value = 0;
};

struct ConditionReport {
    std::string condition;
    Verdict verdict = Verdict::Inconclusive;
    std::map<std::string, double> constants;
    std::vector<SeriesPoint> witness_series;
    std::optional<std::size_t> witness_index;
    std::string window;
    std::vector<std::string> notes;
    std::map<std::string, ConditionReport> sub_reports;

    bool holds() const { return verdict == Verdict::HoldsOnHorizon; }
    bool fails() const { return verdict == Verdict::FailsOnHorizon; }
};

/// Applies the series convention to log-constants ordered by prefix.
///
/// Holds when the last two increments are below log(1+plateau) or the
/// increments shrink geometrically over the last three steps; fails when the
/// last value is infinite or one of the last two increments reaches
/// log(1+growth); otherwise inconclusive.
Verdict series_verdict(const std::vector<SeriesPoint>& series);

/// Prefix schedule over indices 1..R. Uses the checkpoints in [4, R] when at
/// least three exist, otherwise doubling prefixes R, R/2, ... (>= 4), at most
/// eight of them, ascending.
std::vector<std::size_t> prefix_schedule(std::size_t range,
                                         const std::vector<std::size_t>& checkpoints);

/// Running maximum of `terms` (terms[k] belongs to index k+1) sampled at the
/// schedule; values are clamped from below at `floor_value`.
std::vector<SeriesPoint> running_max_series(const std::vector<double>& terms,
                                            const std::vector<std::size_t>& schedule,
                                            double floor_value = 0.0);

/// True when prefix_schedule(range, checkpoints) samples at the checkpoints.
bool schedule_uses_checkpoints(std::size_t range, const std::vector<std::size_t>& checkpoints);

std::string schedule_description(const std::vector<std::size_t>& schedule, bool from_checkpoints);

/// 12 significant digits, "inf"/"-inf"/"nan" for non-finite values.
std::string format_real(double v);
/// `v` rounded to 12 significant digits (non-finite values unchanged).
double round_sig12(double v);

}  // namespace ultraweight
