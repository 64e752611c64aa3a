#pragma once

// Weight sequences in log domain.
//
// A WeightSequence stores log M_p for p = 0..P. Products of sequence values
// become sums throughout the library; M_p = e^{e^p} is representable up to
// P ~ 700 this way, far beyond any linear-scale representation.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ultraweight/report.hpp"

namespace ultraweight {

class WeightSequence {
public:
    /// Throws InvalidInput unless P >= 2, log_values[0] == 0 and all entries
    /// are finite. `checkpoints` are indices (in this sequence's own indexing)
    /// where the construction changes regime; checkers sample prefixes there.
    WeightSequence(std::string label, std::vector<double> log_values,
                   std::vector<std::size_t> checkpoints = {});

    const std::string& label() const { return label_; }
    std::size_t horizon() const { return log_values_.size() - 1; }
    std::span<const double> log_values() const { return log_values_; }
    double log_value(std::size_t p) const { return log_values_.at(p); }
    double operator[](std::size_t p) const { return log_values_[p]; }
    const std::vector<std::size_t>& checkpoints() const { return checkpoints_; }

    /// log M_{p} - log M_{p-1}, entry 0 is 0.
    double log_quotient(std::size_t p) const {
        return p == 0 ? 0.0 : log_values_[p] - log_values_[p - 1];
    }
    bool is_log_convex() const { return log_convex_; }
    bool is_normalized() const { return log_values_.size() > 1 && log_values_[1] >= 0.0; }

    WeightSequence with_label(std::string label) const;
    /// The first `horizon` + 1 entries.
    WeightSequence truncated(std::size_t horizon) const;

private:
    std::string label_;
    std::vector<double> log_values_;
    std::vector<std::size_t> checkpoints_;
    bool log_convex_ = false;
};

/// Quotients mu_p = M_p / M_{p-1} in log domain, mu_0 := 1.
struct QuotientView {
    std::vector<double> log_quotients;

    std::size_t horizon() const { return log_quotients.size() - 1; }
    /// Partial sums of the log quotients, compensated.
    std::vector<double> recompose() const;
};

enum class Family { Gevrey, QGevrey, DoubleExp, ConstantOne };

Family family_from_string(const std::string& name);
std::string to_string(Family f);

using ParamMap = std::map<std::string, double>;

inline constexpr std::size_t kDefaultHorizon = 512;

/// gevrey(s > 0): s log p!; q_gevrey(q > 1, n >= 2): p^n log q;
/// double_exp: e^p for p >= 1; constant_one: 0.
WeightSequence make_family(Family family, const ParamMap& params, std::size_t horizon);
WeightSequence make_family(const std::string& family, const ParamMap& params, std::size_t horizon);

QuotientView quotients(const WeightSequence& m);

/// (M_p) -> (p!^s M_p). Log-convexity is recomputed, not inherited.
WeightSequence pi_transform(const WeightSequence& m, double s);

/// Normalization, nondecreasing quotients, and roots (log M_p)/p strictly
/// increasing on the tail window [P/2, P].
ConditionReport validate_lc(const WeightSequence& m);

/// M preceq N: log C_min(P') = max_{1<=p<=P'} (log M_p - log N_p)/p, clamped at 0.
ConditionReport compare(const WeightSequence& m, const WeightSequence& n);

/// Checkpoints to sample a binary check on indices 1..range: those of the
/// operand with more checkpoints in range.
std::vector<std::size_t> shared_checkpoints(const WeightSequence& a, const WeightSequence& b,
                                            std::size_t range);

double log_factorial(std::size_t p);

nlohmann::json to_json(const WeightSequence& m);
/// Accepts both {"label","horizon","log_values"} and {"family","params","horizon"}.
WeightSequence sequence_from_json(const nlohmann::json& j);

}  // namespace ultraweight
