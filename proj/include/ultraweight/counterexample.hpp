#pragma once

// The sequence N with log N_p = f(p), f piecewise linear and convex with
// breakpoints a_j and slopes b_j chosen so that N has no (genmg)-type bound
// for any d, while the associated matrix M_{omega_N} still has every
// matrix-level moderate growth property.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ultraweight/report.hpp"
#include "ultraweight/sequence.hpp"

namespace ultraweight {

struct CounterexampleVariant {
    bool quasianalytic = false;  // a_{j+1} >= b_j / j - a_j as well
    bool strong_b = false;       // b_j >= (f(a_j) + j^2(a_j+1) + 2 j^2 (a_j+1)^2) / a_j

    std::vector<std::string> names() const;
    static CounterexampleVariant from_names(const std::vector<std::string>& names);
};

struct PiecewiseLinearLogSpec {
    std::vector<std::uint64_t> breakpoints;  // a_1 .. a_J, a_1 = 0
    std::vector<double> slopes;              // b_1 .. b_{J-1}; b_j is the slope on [a_j, a_{j+1}]
    std::vector<double> f_values;            // f(a_1) .. f(a_J)
    double tail_slope = 0;                   // b_J, chosen by the same rule
    std::uint64_t tail_breakpoint = 0;       // a_{J+1}, end of the emitted horizon
    CounterexampleVariant variant;

    std::size_t levels() const { return breakpoints.size(); }
    /// f(p) for 0 <= p <= tail_breakpoint.
    double f(std::uint64_t p) const;
};

/// Sequences longer than this are cut (with a note in the label) instead of
/// materialized; J = 9 still fits.
inline constexpr std::uint64_t kMaxCounterexampleHorizon = 2'000'000;

/// Schedule with equality in (aproperty) and
/// b_j = max(b_{j-1} + 1, rhs of the active b-constraint), j >= 2.
PiecewiseLinearLogSpec build_schedule(std::size_t levels, CounterexampleVariant variant, double b1);

/// N with horizon tail_breakpoint = J (a_J + 1) (capped at
/// kMaxCounterexampleHorizon); checkpoints are the level indices a_l + 1.
WeightSequence counterexample_sequence(const PiecewiseLinearLogSpec& spec);

std::pair<PiecewiseLinearLogSpec, WeightSequence> build_counterexample(std::size_t levels,
                                                                       CounterexampleVariant variant,
                                                                       double b1 = 1.0);

/// Every constraint of the construction, first violation as witness.
ConditionReport validate_schedule(const PiecewiseLinearLogSpec& spec);

/// For l = d .. J-1: log nu_p - log N_{dp} / (dp) at p = a_l + 1, read off N.
/// Throws RangeError when that range is empty.
std::vector<double> witness_divergence(const PiecewiseLinearLogSpec& spec, const WeightSequence& n,
                                       std::size_t d);

struct BlockSums {
    double displayed = 0;  // sum_{j<J} (a_{j+1} - a_j) / b_j
    double harmonic = 0;   // sum_{j<J} 1/j
    double reciprocal = 0; // sum_{j<J} (a_{j+1} - a_j) e^{-b_j} = sum_{p <= a_J} 1/nu_p
};

BlockSums quasianalytic_block_sums(const PiecewiseLinearLogSpec& spec);

nlohmann::json to_json(const PiecewiseLinearLogSpec& spec);
/// Needs "breakpoints" and "slopes"; f values are recomputed when absent.
PiecewiseLinearLogSpec schedule_from_json(const nlohmann::json& j);

}  // namespace ultraweight
