#pragma once

// Weight matrices: finite indexed families {M^(x)} of weight sequences.
//
// Members keep their own horizons. For M_omega the member W^(l) is exact up
// to p = P/l (its conjugate is known on [0, P]), so a common horizon would
// have to shrink to P / max(l) and hide every effect that needs large p.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ultraweight/assoc.hpp"
#include "ultraweight/report.hpp"
#include "ultraweight/sequence.hpp"

namespace ultraweight {

enum class MatrixOrigin { FromOmega, FromSequence, Shifted, Union };

std::string to_string(MatrixOrigin o);
MatrixOrigin matrix_origin_from_string(const std::string& s);

struct MatrixMember {
    double index = 1;
    WeightSequence seq;
    bool shifted = false;  // a member of the shifted matrix inside a union
};

class WeightMatrix {
public:
    /// Members are sorted by (index, shifted). Throws on an empty family.
    WeightMatrix(std::vector<MatrixMember> members, MatrixOrigin origin,
                 std::optional<WeightFunctionHandle> base = std::nullopt, std::size_t horizon = 0);

    static WeightMatrix singleton(WeightSequence m);

    const std::vector<MatrixMember>& members() const { return members_; }
    std::vector<double> indices() const;
    MatrixOrigin origin() const { return origin_; }
    /// The weight a from-omega matrix was built from.
    const std::optional<WeightFunctionHandle>& base() const { return base_; }
    /// Horizon of the source data (P of the base sequence, or the largest member horizon).
    std::size_t horizon() const { return horizon_; }

    bool has_index(double x) const;
    /// First unshifted member with this index (relative tolerance 1e-12).
    const MatrixMember& member(double x) const;

private:
    std::vector<MatrixMember> members_;
    MatrixOrigin origin_;
    std::optional<WeightFunctionHandle> base_;
    std::size_t horizon_ = 0;
};

/// 2^k for -4 <= k <= 4.
std::vector<double> dyadic_grid(int kmin = -4, int kmax = 4);

/// log W^(l)_p = phi*(l p) / l on p <= min(P, floor(P_conj / l)), where
/// P_conj is the conjugate's exact range. Checkpoints c of the base
/// sequence become ceil(c / l).
WeightMatrix build_associated_matrix(const WeightFunctionHandle& w, std::vector<double> indices,
                                     std::size_t horizon);

/// log M~^(x)_p = log M^(x)_{4p} / 4, horizon floor(P_x / 4) per member.
WeightMatrix shifted_matrix(const WeightMatrix& m);

/// M union M~. For from-omega matrices the shifted member of x equals W^(4x)
/// and is filed under index 4x, added only when 4x is not already present.
WeightMatrix mg_union(const WeightMatrix& m);

enum class RelationMode { Roumieu, Beurling, QuotientRoumieu, QuotientBeurling };

RelationMode relation_mode_from_string(const std::string& s);
std::string to_string(RelationMode m);

/// M^(x) preceq N^(y) (or quotient-wise mu^(x)_p <= C nu^(y)_p) on the common horizon.
ConditionReport member_preceq(const WeightSequence& a, const WeightSequence& b, bool quotient_wise);

using MemberList = std::vector<const MatrixMember*>;
using MemberCheck = std::function<ConditionReport(const MatrixMember& source, const MatrixMember& candidate)>;

/// For each source, scans its candidates in order and keeps the first whose
/// check holds (sub-report "source=<index>", constant "witness_index").
/// Without a witness the candidate with the smallest final series value is
/// recorded and the source fails (inconclusive if any candidate was).
/// Aggregate: holds iff every source holds.
ConditionReport witness_search(std::string condition, const MemberList& sources,
                               const std::function<MemberList(const MatrixMember&)>& candidates,
                               const MemberCheck& check);

/// One direction: Roumieu a {preceq} b (for all x exists y) or Beurling
/// a (preceq) b (for all y exists x). Sources with headroom (x <= max/4,
/// resp. y >= 4 min) are checked when there are any, otherwise all indices.
/// Candidates are scanned in grid order; the first HoldsOnHorizon wins.
ConditionReport matrix_preceq(const WeightMatrix& a, const WeightMatrix& b, RelationMode mode);

/// Equivalence: matrix_preceq both ways.
ConditionReport matrix_relation(const WeightMatrix& a, const WeightMatrix& b, RelationMode mode);

/// Exact quotient identities of a from-omega matrix over an associated base M:
/// mu^(x)_p = (mu_{xp-x+1} ... mu_{xp})^{1/x} and mu^(x)_p <= mu_{xp} for
/// integer x; mu^(1/y)_{yp} >= mu_p for integer y; and
/// theta^(cx)_p = (theta^(x)_{c(p-1)+1} ... theta^(x)_{cp})^{1/c} for every x
/// with cx in the grid. Tolerance 1e-9 relative to max(1, |log value|).
ConditionReport quotient_identity_suite(const WeightMatrix& m, std::size_t c);

/// W^(l)_{p+q} <= W^(2l)_p W^(2l)_q for grid l with 2l in the grid, p+q <= max_pq.
ConditionReport mixed_mg_check(const WeightMatrix& m, std::size_t max_pq);

/// l omega_{W^(l)} <= omega <= 2l omega_{W^(l)} + D_l on sampled log t; D_l reported.
ConditionReport omega_sandwich_check(const WeightMatrix& m, std::size_t samples = 256);

/// mu^(x)_{2p} <= A mu~^(x)_p for 2 <= p <= max_p, A = max(1, mu^(x)_2 / mu~^(x)_1).
ConditionReport shifted_quotient_check(const WeightMatrix& m, std::size_t max_p);

/// M^(x) <= M^(y) entrywise for x <= y on common horizons; quotient order too
/// when `quotients` is set.
ConditionReport pointwise_order_check(const WeightMatrix& m, bool quotients);

nlohmann::json to_json(const WeightMatrix& m);
/// Members given as log value arrays; origin defaults to from-sequence.
WeightMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace ultraweight
