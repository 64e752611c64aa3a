#pragma once

// Associated weight function, counting function and Young conjugate.
//
// Everything is parametrized by u = log t. For M in LC, phi(u) = omega_M(e^u)
// is the upper envelope of the affine maps u -> p u - log M_p, so it is
// piecewise linear with kinks at the log quotients, and Sigma_M(e^u) is the
// slope on the piece containing u. The exact range is u <= log mu_P: beyond
// the last quotient the truncated sup over p <= P no longer equals the sup
// over all p.

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ultraweight/report.hpp"
#include "ultraweight/sequence.hpp"

namespace ultraweight {

class AssociatedFunction {
public:
    /// Throws InvalidInput unless `source` is log-convex and normalized.
    explicit AssociatedFunction(WeightSequence source);

    const WeightSequence& source() const { return source_; }
    std::size_t horizon() const { return source_.horizon(); }
    const std::vector<double>& log_quotients() const { return quotients_.log_quotients; }
    /// log mu_P; omega and Sigma are exact for u up to here.
    double log_range() const { return quotients_.log_quotients.back(); }

    /// |{1 <= p <= P : log mu_p <= u}|.
    std::size_t sigma_log(double u) const;
    /// |{1 <= p <= P : log mu_p < u}|, the left limit of Sigma at e^u.
    std::size_t sigma_left_log(double u) const;
    /// omega_M(e^u) = Sigma u - log M_Sigma.
    double omega_log(double u) const;
    /// max_p (p u - log M_p) by scanning all p; ties go to the largest p.
    double omega_brute_log(double u, std::size_t* argmax = nullptr) const;
    /// sum over log mu_p <= u of (u - log mu_p), compensated.
    double omega_integral_log(double u) const;
    /// Linear interpolation of p -> log M_p, 0 <= x <= P.
    double conjugate(double x) const;

private:
    void require_exact(double u) const;

    WeightSequence source_;
    QuotientView quotients_;
};

/// Either omega_M for an LC sequence or omega_s(t) = max(0, (log t)^s), s > 1.
class WeightFunctionHandle {
public:
    static WeightFunctionHandle associated(WeightSequence m);
    /// `log_range` bounds the sampling of conditions and the conjugate oracle.
    static WeightFunctionHandle omega_s(double s, double log_range = 1e4);

    std::string label() const;
    bool is_associated() const { return static_cast<bool>(assoc_); }
    const AssociatedFunction& assoc() const;
    double s() const { return s_; }

    double omega_log(double u) const;
    double log_range() const;
    /// phi*(x): exact interpolation for omega_M, (s-1)(x/s)^{s/(s-1)} for omega_s.
    double conjugate(double x) const;
    /// Largest x with an exact conjugate (P for omega_M, infinity for omega_s).
    double conjugate_range() const;

private:
    std::shared_ptr<const AssociatedFunction> assoc_;
    double s_ = 0;
    double log_range_ = 0;
};

// Spec-level free functions. `t` is linear scale; the *_log variants of the
// class take u = log t and reach further (e^{e^p} overflows).
double omega_eval(const AssociatedFunction& a, double t);
std::size_t sigma_count(const AssociatedFunction& a, double t);
double omega_integral_form(const AssociatedFunction& a, double t);
double young_conjugate(const AssociatedFunction& a, double x);

/// sup_{0 <= y <= Y} (x y - phi(y)) over a log-spaced y grid of `grid` points
/// (Y the handle's log range), refined by ternary search around the best node.
/// Uses only omega evaluations, never the interpolation.
double young_conjugate_oracle(const WeightFunctionHandle& w, double x, std::size_t grid = 256);

/// log sup_t t^p / exp(omega(t)), the max over the kinks u = log mu_k.
/// Requires p <= P/2.
double reconstruct_sequence(const AssociatedFunction& a, std::size_t p);

/// A nondecreasing function of u given by its values, left limits and the
/// points where it fails to be linear (kinks or jumps). Continuous functions
/// use value == left_value. Exact on u <= range.
struct LogPiecewise {
    std::function<double(double)> value;
    std::function<double(double)> left_value;
    std::vector<double> kinks;
    double range = 0;
};

LogPiecewise omega_piecewise(const WeightFunctionHandle& w);
LogPiecewise sigma_piecewise(const AssociatedFunction& a);

/// Minimal log H >= 0 with 2 rhs(u) <= lhs(u + log H) (+ H if `additive`)
/// for all 0 <= u <= U, one value per prefix U (ascending). The inequality
/// is checked exactly at every kink of both sides, with left limits; the
/// minimal H is found by bisection. +infinity when even the largest H that
/// keeps U + log H inside lhs's exact range does not work.
std::vector<SeriesPoint> doubling_constant_series(const LogPiecewise& lhs, const LogPiecewise& rhs,
                                                  const std::vector<double>& prefixes, bool additive);

/// t-prefixes (as u = log t) for a check whose rhs sequence has quotients
/// `log_mu` and checkpoints `checkpoints`: quotient values at the prefix
/// schedule over P/4, kept strictly below `ceiling`.
std::vector<double> quotient_prefixes(const std::vector<double>& log_mu,
                                      const std::vector<std::size_t>& checkpoints, double ceiling);

inline const std::set<std::string>& weight_condition_ids() {
    static const std::set<std::string> ids{"om1", "om3", "om4", "om6", "strong_nq"};
    return ids;
}

/// Reports keyed by condition id (a subset of weight_condition_ids()).
/// Throws RangeError when the exact range cannot hold the sampling grid.
std::map<std::string, ConditionReport> check_weight_conditions(const WeightFunctionHandle& w,
                                                               const std::set<std::string>& which);

/// CSV rows "t,omega,sigma" for the given u = log t values.
std::string omega_table_csv(const AssociatedFunction& a, const std::vector<double>& log_t);
/// CSV rows "x,phi_star".
std::string conjugate_table_csv(const WeightFunctionHandle& w, const std::vector<double>& xs);

}  // namespace ultraweight
