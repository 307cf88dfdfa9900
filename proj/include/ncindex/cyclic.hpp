#pragma once

// Cyclic cochains on C Gamma (evaluated on tuples of group elements and
// extended multilinearly), group cochains on Gamma^{n+1}, the dictionary
// tau <-> c_tau between them, the cyclic Chern character and pairings.

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "ncindex/nc_forms.hpp"

namespace ncindex {

using GroupTuple = std::vector<GroupElement>;

/// Shared memo table for pure evaluators; safe under concurrent use.
class TupleMemo;

/// Degree-n functional on (n+1)-tuples g_0 (x) ... (x) g_n.
class CyclicCochain {
public:
    using Evaluator = std::function<cplx(const GroupTuple&)>;

    struct Flags {
        bool normalized = false;      ///< vanishes if a slot i >= 1 is e
        bool supported_at_e = false;  ///< vanishes unless g_0 ... g_n = e
    };

    /// Pure evaluators are memoized unless `memoize` is false (for
    /// evaluators that are already table lookups).
    CyclicCochain(GroupPtr group, int degree, Evaluator f, Flags flags, bool memoize = true);

    const GroupPtr& group() const { return group_; }
    int degree() const { return degree_; }
    const Flags& flags() const { return flags_; }
    bool normalized() const { return flags_.normalized; }
    bool supported_at_e() const { return flags_.supported_at_e; }

    cplx operator()(const GroupTuple& g) const;
    /// Multilinear extension to a combination of scalar (N = 1) words.
    cplx evaluate(const WordCombination& chain) const;

private:
    GroupPtr group_;
    int degree_;
    Evaluator f_;
    Flags flags_;
    std::shared_ptr<TupleMemo> memo_;
};

/// Degree-n group cochain tau: Gamma^{n+1} -> C.
class GroupCocycle {
public:
    using Evaluator = std::function<cplx(const GroupTuple&)>;

    struct Flags {
        bool invariant = false;    ///< tau(g g_0, ..., g g_n) = tau(g_0, ..., g_n)
        bool alternating = false;  ///< antisymmetric under transpositions
    };

    GroupCocycle(GroupPtr group, int degree, Evaluator f, Flags flags);

    const GroupPtr& group() const { return group_; }
    int degree() const { return degree_; }
    const Flags& flags() const { return flags_; }

    cplx operator()(const GroupTuple& g) const;

    /// Max deviation from left invariance over random tuples in the ball of radius r.
    double invariance_defect(std::mt19937_64& rng, int samples, int radius) const;
    /// Max deviation from antisymmetry under adjacent transpositions.
    double alternation_defect(std::mt19937_64& rng, int samples, int radius) const;

private:
    GroupPtr group_;
    int degree_;
    Evaluator f_;
    Flags flags_;
    std::shared_ptr<TupleMemo> memo_;
};

/// (b^t phi)(a_0..a_{n+1}) = sum_{i<=n} (-1)^i phi(.., a_i a_{i+1}, ..)
///                           + (-1)^{n+1} phi(a_{n+1} a_0, a_1, .., a_n).
CyclicCochain b_transpose(const CyclicCochain& phi);

/// Simplicial differential of group cochains.
GroupCocycle d_gamma(const GroupCocycle& tau);

/// c_tau(g_0..g_n) = tau(e, g_1, g_1 g_2, .., g_1..g_n) if g_0 .. g_n = e, else 0.
/// Requires an invariant alternating tau unless `require_alternating` is false.
CyclicCochain tau_to_c(const GroupCocycle& tau, bool require_alternating = true);

/// tau_c(e, g_1..g_n) = c(g_n^{-1}, g_1, g_1^{-1} g_2, .., g_{n-1}^{-1} g_n),
/// extended by left invariance.
GroupCocycle c_to_tau(const CyclicCochain& c);

/// The canonical trace as a degree-0 cochain.
CyclicCochain trace_e_cochain(GroupPtr group);

/// Cyclic chains (-1)^m tr p^{(x)(2m+1)} for m = 0..m_max, as scalar words.
std::vector<WordCombination> chern_lambda(const AlgebraMatrix& p, int m_max);

/// Pairing of phi with the algebra-degree-n part of a scalar (N = 1) mixed
/// form; returns a manifold form.
ManifoldForm pair_cochain_form(const CyclicCochain& phi, const MixedForm& w);
/// Same for purely algebraic forms.
cplx pair_cochain_algebra(const CyclicCochain& phi, const AlgebraForm& w);

/// Normalized cyclic cocycles of C(Z/k) in the given degree: a basis of the
/// kernel of b^t on normalized cyclic cochains, computed exactly by linear
/// algebra on the finite tuple space.
std::vector<CyclicCochain> cyclic_cocycle_basis(const GroupPtr& group, int degree);

/// Random element of the same kernel: Gaussian complex weights on the basis.
CyclicCochain random_cyclic_cocycle(const GroupPtr& group, int degree, std::mt19937_64& rng);

/// Enumerates all tuples of length `len` in a finite group.
std::vector<GroupTuple> all_tuples(const GroupSpec& group, int len);

/// Table cochain on a finite group with integer values in [-5, 5], so that
/// identities among its coboundaries hold exactly.
CyclicCochain random_integer_cochain(std::mt19937_64& rng, const GroupPtr& group, int degree, bool normalized);
/// Invariant integer-valued group cochain on a finite group: a table of the
/// differences g_0^{-1} g_i.
GroupCocycle random_invariant_cochain(std::mt19937_64& rng, const GroupPtr& group, int degree);

}  // namespace ncindex
