#pragma once

// Verdict-with-witness checkers for growth conditions on weight sequences
// and weight matrices.
//
// Sup-type conditions ("exists C for all p") are reported as the series of
// prefix-optimal log-constants over a prefix schedule and classified by
// series_verdict. Liminf-type conditions are estimated on a fixed tail
// window and compared against the threshold with a 1e-6 multiplicative
// margin, so boundary cases fail deterministically.

#include <map>
#include <string>

#include "ultraweight/assoc.hpp"
#include "ultraweight/matrix.hpp"
#include "ultraweight/report.hpp"
#include "ultraweight/sequence.hpp"

namespace ultraweight {

/// Items i..vi of the moderate growth characterization, keyed "mg_i" ..
/// "mg_vi", plus "mg_coincide" asserting that the six verdicts agree.
/// Items iv and v need an LC sequence (InvalidInput otherwise).
std::map<std::string, ConditionReport> mg_battery(const WeightSequence& m);

/// "dc" (M_{p+1} <= D^{p+1} M_p), "mualmost" (mu_{p+1} <= A mu_p) and
/// "quasianalytic" (sum 1/mu_p diverges, judged from the partial sums).
std::map<std::string, ConditionReport> growth_flags(const WeightSequence& m);

/// min over p in [P/(2Q), P/Q] of log mu_{Qp} - log mu_p.
double liminf_ratio_estimate(const WeightSequence& m, std::size_t Q);

/// "beta1" (> Q), "beta3" (> 1), "condv" (> Q^beta) from the liminf
/// estimate, and "gamma1" (sup_p (mu_p/p) sum_{k>=p} 1/mu_k, tails cut at P).
std::map<std::string, ConditionReport> beta_gamma(const WeightSequence& m, std::size_t Q, double beta);

/// For d = 1..d_max the series of log A_min(P', d) = max_{p<=P'} (log mu_p -
/// log M_{dp}/(dp)) on p <= P/d_max; g is the least d whose series holds
/// (constant "g", +infinity when none does).
ConditionReport moderate_growth_index(const WeightSequence& m, std::size_t d_max);

enum class MatrixVariant { R, B };
enum class MgLevel { I, II, III, IV, V };

MatrixVariant matrix_variant_from_string(const std::string& s);
MgLevel mg_level_from_string(const std::string& s);
std::string to_string(MatrixVariant v);
std::string to_string(MgLevel l);

/// One pair check of the mixed moderate growth levels with lhs L and rhs R:
///   I   L_{p+q} <= C^{p+q} R_p R_q      II  L_{2p} <= C^{2p} R_p^2
///   III 2 omega_R(t) <= omega_L(Ht) + H IV  lambda_{2p} <= A rho_p
///   V   2 Sigma_R(t) <= Sigma_L(At)
ConditionReport mixed_mg_pair(const WeightSequence& lhs, const WeightSequence& rhs, MgLevel level);

/// Roumieu: for each source x the witness y >= x is searched (lhs = M^(x),
/// rhs = M^(y)); Beurling: the witness y <= x (lhs = M^(y), rhs = M^(x)).
/// Sources with headroom (x <= max/4 resp. x >= 4 min) when there are any.
ConditionReport matrix_mg(const WeightMatrix& m, MatrixVariant variant, MgLevel level);

/// Roumieu: integer indices, mu^(x)_p <= A (M^(y)_p)^{1/p} with x <= y <= d_max x;
/// Beurling: indices 1/n, mu^(y)_p <= A (M^(x)_p)^{1/p} with x/d_max <= y <= x.
ConditionReport quotient_root_comparison(const WeightMatrix& m, MatrixVariant variant,
                                         std::size_t d_max = 8);

/// nu_p <= A C^{2p} (N_{dp})^{1/(dp)} with C searched on {1, 2, 4, 8};
/// `witness_on` keeps the per-C series as sub-reports.
ConditionReport equlemma_check(const WeightSequence& n, std::size_t d, bool witness_on = true);

/// (beta1) with Q = 2, finite moderate growth index (d <= d_max) and
/// (mualmost), plus the inherited bound mu^(c)_{p+1} <= A^c mu^(c)_p for
/// the members (M_{cp})^{1/c}, c = 2, 3, 4.
ConditionReport admissibility_bundle(const WeightSequence& m, std::size_t d_max = 8);

/// Liminf estimates for W^(x) (Q, beta), W^(cx) (Q, beta) and W^(x/c)
/// (4Q, beta = 0), and the exact identity
/// theta^(cx)_p = (theta^(x)_{c(p-1)+1} ... theta^(x)_{cp})^{1/c}.
ConditionReport condv_propagation(const WeightMatrix& m, double x, std::size_t c, std::size_t Q, double beta);

}  // namespace ultraweight
