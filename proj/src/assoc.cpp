#include "ultraweight/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ultraweight {

namespace {

constexpr double kLog2 = 0.69314718055994530942;

// Samples for the weight-function conditions: the kinks (if any) plus a
// log-spaced grid in u, all inside [lo, hi].
std::vector<double> sample_grid(const std::vector<double>& kinks, double lo, double hi, std::size_t n) {
    std::vector<double> out;
    for (double k : kinks)
        if (k >= lo && k <= hi) out.push_back(k);
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1)));
    out.back() = std::min(out.back(), hi);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Geometric prefixes hi, hi/2, ... above lo, ascending.
std::vector<double> halving_prefixes(double lo, double hi, std::size_t count) {
    std::vector<double> out;
    for (double u = hi; u >= lo && out.size() < count; u /= 2) out.push_back(u);
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<double> condition_prefixes(const WeightFunctionHandle& w) {
    if (w.is_associated()) {
        const auto& a = w.assoc();
        return quotient_prefixes(a.log_quotients(), a.source().checkpoints(), a.log_range());
    }
    return halving_prefixes(1.0, w.log_range() / 2, 8);
}

// Smallest positive kink of omega_M; 1e-3 for omega_s.
double lower_sampling_bound(const WeightFunctionHandle& w) {
    if (!w.is_associated()) return 1e-3;
    for (double q : w.assoc().log_quotients())
        if (q > 0) return std::max(q, 1e-3);
    return kInf;
}

ConditionReport check_om1(const WeightFunctionHandle& w, const std::vector<double>& grid) {
    ConditionReport r;
    r.condition = "om1";
    const double top = w.log_range() - kLog2;
    std::vector<std::pair<double, double>> terms;
    for (double u : grid) {
        if (u > top) break;
        const double om = w.omega_log(u);
        if (om <= 0) continue;
        terms.emplace_back(u, std::log(w.omega_log(u + kLog2)) - std::log(om + 1.0));
    }
    const auto prefixes = halving_prefixes(grid.front(), top, 8);
    double best = 0;
    std::size_t k = 0;
    for (double U : prefixes) {
        for (; k < terms.size() && terms[k].first <= U; ++k) best = std::max(best, terms[k].second);
        r.witness_series.push_back({U, best});
    }
    r.verdict = series_verdict(r.witness_series);
    r.constants["log_L"] = r.witness_series.empty() ? 0.0 : r.witness_series.back().value;
    r.window = "omega(2t) <= L(omega(t)+1), log t prefixes halving from " + format_real(top);
    return r;
}

ConditionReport check_om3(const WeightFunctionHandle& w, const std::vector<double>& grid) {
    ConditionReport r;
    r.condition = "om3";
    for (double U : halving_prefixes(grid.front(), w.log_range(), 8)) {
        const double om = w.omega_log(U);
        if (om > 0) r.witness_series.push_back({U, U / om});
    }
    r.window = "log t / omega(t) at log t prefixes halving from " + format_real(w.log_range());
    const auto& s = r.witness_series;
    const std::size_t n = s.size();
    if (n >= 3) {
        const bool decreasing = s[n - 1].value < s[n - 2].value && s[n - 2].value < s[n - 3].value;
        const bool stalled = s[n - 1].value >= s[n - 2].value && s[n - 2].value >= s[n - 3].value;
        if (decreasing && s[n - 1].value < 1.0)
            r.verdict = Verdict::HoldsOnHorizon;
        else if (stalled)
            r.verdict = Verdict::FailsOnHorizon;
    }
    if (n) r.constants["ratio"] = s.back().value;
    return r;
}

ConditionReport check_om4(const WeightFunctionHandle& w, const std::vector<double>& grid) {
    ConditionReport r;
    r.condition = "om4";
    double worst = -kInf;
    const auto prefixes = halving_prefixes(grid.front(), grid.back(), 8);
    std::size_t next = 0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double a = grid[i - 1], b = grid[i], c = grid[i + 1];
        const double fa = w.omega_log(a), fb = w.omega_log(b), fc = w.omega_log(c);
        const double chord = fa + (fc - fa) * (b - a) / (c - a);
        const double scale = std::max({1.0, std::abs(fa), std::abs(fc)});
        worst = std::max(worst, (fb - chord) / scale);
        for (; next < prefixes.size() && prefixes[next] <= c; ++next)
            r.witness_series.push_back({prefixes[next], worst});
    }
    r.verdict = worst <= 1e-9 ? Verdict::HoldsOnHorizon : Verdict::FailsOnHorizon;
    r.constants["max_relative_residual"] = worst;
    r.window = "chord residuals on " + std::to_string(grid.size()) + " sampled log t";
    return r;
}

ConditionReport check_om6(const WeightFunctionHandle& w) {
    ConditionReport r;
    r.condition = "om6";
    const auto f = omega_piecewise(w);
    r.witness_series = doubling_constant_series(f, f, condition_prefixes(w), true);
    r.verdict = series_verdict(r.witness_series);
    r.constants["log_H"] = r.witness_series.empty() ? 0.0 : r.witness_series.back().value;
    r.window = "2 omega(t) <= omega(Ht) + H, exact at kinks, log t prefixes";
    return r;
}

// kappa(y) = int_0^S phi(log y + s) e^{-s} ds.
double kappa_associated(const AssociatedFunction& a, double U, double S) {
    const auto& q = a.log_quotients();
    const auto& m = a.source();
    double total = 0;
    double s0 = 0;
    while (s0 < S) {
        const double v = U + s0;
        const std::size_t k = a.sigma_log(v);
        double s1 = S;
        if (k < a.horizon()) s1 = std::min(S, q[k + 1] - U);
        // piece phi(v) = k v - log M_k; antiderivative -(k(U+s) - L_k + k) e^{-s}
        auto F = [&](double s) {
            return -(static_cast<double>(k) * (U + s) - m[k] + static_cast<double>(k)) * std::exp(-s);
        };
        total += F(s1) - F(s0);
        if (s1 <= s0) break;
        s0 = s1;
    }
    return total;
}

double kappa_smooth(const WeightFunctionHandle& w, double U, double S) {
    const std::size_t n = 4000;
    const double h = S / n;
    auto f = [&](double s) { return w.omega_log(U + s) * std::exp(-s); };
    double sum = f(0) + f(S);
    for (std::size_t i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(h * static_cast<double>(i));
    return sum * h / 3.0;
}

ConditionReport check_strong_nq(const WeightFunctionHandle& w) {
    ConditionReport r;
    r.condition = "strong_nq";
    bool truncated_ok = true;
    double best = 0;
    double last_S = 0;
    for (double U : condition_prefixes(w)) {
        const double S = std::min(w.log_range() - U, 745.0);
        if (S <= 0) continue;
        const double om = w.omega_log(U);
        const double tail = w.omega_log(U + S) * std::exp(-S);
        if (!(tail <= 1e-6 * std::max(1.0, om))) truncated_ok = false;
        const double kappa = w.is_associated() ? kappa_associated(w.assoc(), U, S) : kappa_smooth(w, U, S);
        best = std::max(best, std::log(std::max(kappa, 1e-300)) - std::log(om + 1.0));
        r.witness_series.push_back({U, best});
        last_S = S;
    }
    const Verdict v = series_verdict(r.witness_series);
    if (truncated_ok)
        r.verdict = v;
    else
        r.verdict = v == Verdict::FailsOnHorizon ? v : Verdict::Inconclusive;
    if (!truncated_ok)
        r.notes.push_back("truncation criterion omega(yT)/T <= 1e-6 omega(y) not met inside the exact "
                          "range; truncated integrals are lower bounds");
    r.constants["log_C"] = best;
    r.constants["truncation_log_T"] = last_S;
    r.window = "kappa(y) truncated at log T = min(range - log y, 745), log y prefixes";
    return r;
}

}  // namespace

AssociatedFunction::AssociatedFunction(WeightSequence source) : source_(std::move(source)) {
    if (!source_.is_log_convex()) throw InvalidInput("associated function needs a log-convex sequence ('" + source_.label() + "')");
    if (!source_.is_normalized()) throw InvalidInput("associated function needs a normalized sequence ('" + source_.label() + "')");
    quotients_ = quotients(source_);
    // differences of large log values wobble by a few ulps on linear stretches;
    // the LC check tolerated that, the search structures need sorted quotients
    auto& q = quotients_.log_quotients;
    for (std::size_t k = 2; k < q.size(); ++k) q[k] = std::max(q[k], q[k - 1]);
}

void AssociatedFunction::require_exact(double u) const {
    if (!(u <= log_range()))
        throw RangeError("log t = " + format_real(u) + " beyond the exact range log mu_P = " +
                         format_real(log_range()));
}

std::size_t AssociatedFunction::sigma_log(double u) const {
    require_exact(u);
    const auto& q = quotients_.log_quotients;
    return static_cast<std::size_t>(std::upper_bound(q.begin() + 1, q.end(), u) - (q.begin() + 1));
}

std::size_t AssociatedFunction::sigma_left_log(double u) const {
    require_exact(u);
    const auto& q = quotients_.log_quotients;
    return static_cast<std::size_t>(std::lower_bound(q.begin() + 1, q.end(), u) - (q.begin() + 1));
}

double AssociatedFunction::omega_log(double u) const {
    const std::size_t k = sigma_log(u);
    return k == 0 ? 0.0 : static_cast<double>(k) * u - source_[k];
}

double AssociatedFunction::omega_brute_log(double u, std::size_t* argmax) const {
    require_exact(u);
    double best = 0;
    std::size_t arg = 0;
    for (std::size_t p = 1; p <= horizon(); ++p) {
        const double v = static_cast<double>(p) * u - source_[p];
        if (v >= best) {
            best = v;
            arg = p;
        }
    }
    if (argmax) *argmax = arg;
    return best;
}

double AssociatedFunction::omega_integral_log(double u) const {
    const std::size_t k = sigma_log(u);
    double sum = 0, carry = 0;
    for (std::size_t p = 1; p <= k; ++p) {
        const double y = (u - quotients_.log_quotients[p]) - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double AssociatedFunction::conjugate(double x) const {
    const double P = static_cast<double>(horizon());
    if (!(x >= 0) || x > P) throw RangeError("conjugate argument " + format_real(x) + " outside [0, P]");
    const auto i = static_cast<std::size_t>(std::floor(x));
    if (i >= horizon()) return source_[horizon()];
    const double frac = x - static_cast<double>(i);
    if (frac == 0) return source_[i];
    return source_[i] + frac * (source_[i + 1] - source_[i]);
}

WeightFunctionHandle WeightFunctionHandle::associated(WeightSequence m) {
    WeightFunctionHandle h;
    h.assoc_ = std::make_shared<const AssociatedFunction>(std::move(m));
    return h;
}

WeightFunctionHandle WeightFunctionHandle::omega_s(double s, double log_range) {
    if (!(s > 1)) throw InvalidInput("omega_s needs s > 1");
    if (!(log_range > 1)) throw InvalidInput("omega_s needs a log range > 1");
    WeightFunctionHandle h;
    h.s_ = s;
    h.log_range_ = log_range;
    return h;
}

std::string WeightFunctionHandle::label() const {
    if (assoc_) return "omega_{" + assoc_->source().label() + "}";
    return "omega_" + format_real(s_);
}

const AssociatedFunction& WeightFunctionHandle::assoc() const {
    if (!assoc_) throw InvalidInput("handle " + label() + " is not an associated function");
    return *assoc_;
}

double WeightFunctionHandle::omega_log(double u) const {
    if (assoc_) return assoc_->omega_log(u);
    return u > 0 ? std::pow(u, s_) : 0.0;
}

double WeightFunctionHandle::log_range() const { return assoc_ ? assoc_->log_range() : log_range_; }

double WeightFunctionHandle::conjugate(double x) const {
    if (assoc_) return assoc_->conjugate(x);
    if (!(x >= 0)) throw RangeError("conjugate argument must be >= 0");
    return (s_ - 1) * std::pow(x / s_, s_ / (s_ - 1));
}

double WeightFunctionHandle::conjugate_range() const {
    return assoc_ ? static_cast<double>(assoc_->horizon()) : kInf;
}

double omega_eval(const AssociatedFunction& a, double t) {
    if (!(t > 0)) throw InvalidInput("omega_eval needs t > 0");
    return a.omega_brute_log(std::log(t));
}

std::size_t sigma_count(const AssociatedFunction& a, double t) {
    if (!(t > 0)) throw InvalidInput("sigma_count needs t > 0");
    return a.sigma_log(std::log(t));
}

double omega_integral_form(const AssociatedFunction& a, double t) {
    if (!(t > 0)) throw InvalidInput("omega_integral_form needs t > 0");
    return a.omega_integral_log(std::log(t));
}

double young_conjugate(const AssociatedFunction& a, double x) { return a.conjugate(x); }

double young_conjugate_oracle(const WeightFunctionHandle& w, double x, std::size_t grid) {
    if (grid < 64) throw InvalidInput("oracle grid must have at least 64 points");
    if (!(x >= 0)) throw RangeError("oracle argument must be >= 0");
    const double Y = w.log_range();
    const double lo = 1e-6;
    if (!(Y > lo)) throw RangeError("empty feasible grid for the conjugate oracle");

    auto f = [&](double y) { return x * y - w.omega_log(y); };
    std::vector<double> ys{0.0};
    const double ratio = std::log(Y / lo);
    for (std::size_t i = 0; i < grid; ++i)
        ys.push_back(lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(grid - 1)));
    ys.back() = Y;

    std::size_t best = 0;
    double best_val = f(0.0);
    for (std::size_t i = 1; i < ys.size(); ++i) {
        const double v = f(ys[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    // x y - phi(y) is concave, so the maximizer lies between the neighbours
    double a = ys[best == 0 ? 0 : best - 1];
    double b = ys[std::min(best + 1, ys.size() - 1)];
    for (int it = 0; it < 300 && b - a > 0; ++it) {
        const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
        if (f(m1) < f(m2))
            a = m1;
        else
            b = m2;
    }
    return std::max(best_val, f(0.5 * (a + b)));
}

double reconstruct_sequence(const AssociatedFunction& a, std::size_t p) {
    if (p > a.horizon() / 2)
        throw RangeError("reconstruct_sequence needs p <= P/2 (p = " + std::to_string(p) + ")");
    const double dp = static_cast<double>(p);
    double best = 0;  // u = 0
    for (std::size_t k = 1; k <= a.horizon(); ++k) {
        const double u = a.log_quotients()[k];
        if (u < 0) continue;
        best = std::max(best, dp * u - a.omega_log(u));
    }
    return best;
}

LogPiecewise omega_piecewise(const WeightFunctionHandle& w) {
    LogPiecewise f;
    f.value = [w](double u) { return w.omega_log(u); };
    f.left_value = f.value;
    f.range = w.log_range();
    if (w.is_associated()) {
        const auto& q = w.assoc().log_quotients();
        f.kinks.assign(q.begin() + 1, q.end());
        f.kinks.erase(std::unique(f.kinks.begin(), f.kinks.end()), f.kinks.end());
    } else {
        f.kinks = sample_grid({0.0}, 1e-3, f.range, 4096);
        f.kinks.insert(f.kinks.begin(), 0.0);
    }
    return f;
}

LogPiecewise sigma_piecewise(const AssociatedFunction& a) {
    auto shared = std::make_shared<const AssociatedFunction>(a);
    LogPiecewise f;
    f.value = [shared](double u) { return static_cast<double>(shared->sigma_log(u)); };
    f.left_value = [shared](double u) { return static_cast<double>(shared->sigma_left_log(u)); };
    const auto& q = a.log_quotients();
    f.kinks.assign(q.begin() + 1, q.end());
    f.kinks.erase(std::unique(f.kinks.begin(), f.kinks.end()), f.kinks.end());
    f.range = a.log_range();
    return f;
}

std::vector<SeriesPoint> doubling_constant_series(const LogPiecewise& lhs, const LogPiecewise& rhs,
                                                  const std::vector<double>& prefixes, bool additive) {
    std::vector<SeriesPoint> out;
    double floor_h = 0;
    for (double U : prefixes) {
        if (U > rhs.range || U > lhs.range)
            throw RangeError("t-prefix " + format_real(U) + " outside the exact range");
        // range and prefix are differences of rounded logs; a needed h sitting exactly
        // at the cap must not read as infinite. Evaluations clamp to the range, which
        // only lowers the lhs.
        const double cap = lhs.range - U + 1e-9 * std::max(1.0, lhs.range);

        auto feasible = [&](double h) {
            const double extra = additive ? std::exp(h) : 0.0;
            auto ok = [&](double c) {
                const double r = 2 * rhs.value(c);
                const double l = lhs.value(std::min(c + h, lhs.range)) + extra;
                const double tol = 1e-12 * std::max({1.0, std::abs(r), std::abs(l)});
                if (l < r - tol) return false;
                const double rl = 2 * rhs.left_value(c);
                const double ll = lhs.left_value(std::min(c + h, lhs.range)) + extra;
                return ll >= rl - 1e-12 * std::max({1.0, std::abs(rl), std::abs(ll)});
            };
            if (!ok(0.0) || !ok(U)) return false;
            for (double k : rhs.kinks) {
                if (k > U) break;
                if (k >= 0 && !ok(k)) return false;
            }
            for (double k : lhs.kinks) {
                const double c = k - h;
                if (c > U) break;
                if (c >= 0 && !ok(c)) return false;
            }
            return true;
        };

        double value;
        if (!(cap >= floor_h)) {
            value = kInf;
        } else if (feasible(floor_h)) {
            value = floor_h;
        } else if (!feasible(cap)) {
            value = kInf;
        } else {
            double lo = floor_h, hi = cap;
            for (int it = 0; it < 400 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
                const double mid = hi > 4 * std::max(lo, 1.0) ? std::sqrt(std::max(lo, 1.0) * hi) : 0.5 * (lo + hi);
                if (feasible(mid))
                    hi = mid;
                else
                    lo = mid;
            }
            value = hi;
        }
        out.push_back({U, value});
        floor_h = value;
    }
    return out;
}

std::vector<double> quotient_prefixes(const std::vector<double>& log_mu,
                                      const std::vector<std::size_t>& checkpoints, double ceiling) {
    const std::size_t P = log_mu.size() - 1;
    std::vector<double> out;
    for (std::size_t s : prefix_schedule(std::max<std::size_t>(P / 4, 1), checkpoints)) {
        const double U = log_mu[std::min(s, P)];
        if (U >= ceiling) continue;
        if (!out.empty() && U <= out.back()) continue;
        out.push_back(U);
    }
    return out;
}

std::map<std::string, ConditionReport> check_weight_conditions(const WeightFunctionHandle& w,
                                                               const std::set<std::string>& which) {
    for (const auto& id : which)
        if (!weight_condition_ids().count(id)) throw InvalidInput("unknown weight condition '" + id + "'");
    const double lo = lower_sampling_bound(w);
    const double hi = w.log_range();
    if (!(hi > 4 * lo))
        throw RangeError("exact range of " + w.label() + " too small for the sampling grid");
    std::vector<double> kinks;
    if (w.is_associated()) kinks = w.assoc().log_quotients();
    const auto grid = sample_grid(kinks, lo, hi, 256);

    std::map<std::string, ConditionReport> out;
    if (which.count("om1")) out["om1"] = check_om1(w, grid);
    if (which.count("om3")) out["om3"] = check_om3(w, grid);
    if (which.count("om4")) out["om4"] = check_om4(w, grid);
    if (which.count("om6")) out["om6"] = check_om6(w);
    if (which.count("strong_nq")) out["strong_nq"] = check_strong_nq(w);
    return out;
}

std::string omega_table_csv(const AssociatedFunction& a, const std::vector<double>& log_t) {
    std::ostringstream os;
    os << "t,omega,sigma\n";
    for (double u : log_t)
        os << format_real(std::exp(u)) << ',' << format_real(a.omega_log(u)) << ',' << a.sigma_log(u) << '\n';
    return os.str();
}

std::string conjugate_table_csv(const WeightFunctionHandle& w, const std::vector<double>& xs) {
    std::ostringstream os;
    os << "x,phi_star\n";
    for (double x : xs) os << format_real(x) << ',' << format_real(w.conjugate(x)) << '\n';
    return os.str();
}

}  // namespace ultraweight
