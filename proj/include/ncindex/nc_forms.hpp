#pragma once

// Noncommutative differential forms over B = M_N(C Gamma): tensor words
// m_0 (x) m_1 (x) ... (x) m_q = m_0 dm_1 ... dm_q, stored in the canonical
// representative where slots >= 1 have no scalar-identity component, and
// mixed forms with scalar grid-form coefficients on a manifold.

#include <compare>
#include <map>
#include <memory>
#include <vector>

#include "ncindex/field.hpp"
#include "ncindex/group_algebra.hpp"

namespace ncindex {

/// Basis element E_{row,col} (x) g of M_N(C Gamma).
struct MatrixUnit {
    int row = 0;
    int col = 0;
    GroupElement g;

    auto operator<=>(const MatrixUnit&) const = default;
    bool operator==(const MatrixUnit&) const = default;
};

using Word = std::vector<MatrixUnit>;
using WordCombination = std::map<Word, cplx>;

inline int word_degree(const Word& w) { return static_cast<int>(w.size()) - 1; }

/// Word-level algebra of the canonical representatives for fixed (Gamma, N).
class WordAlgebra {
public:
    WordAlgebra(GroupPtr group, int n);

    const GroupPtr& group() const { return group_; }
    int n() const { return n_; }
    bool operator==(const WordAlgebra& o) const { return n_ == o.n_ && *group_ == *o.group_; }

    /// Subtracts the scalar-identity component (tau(tr m)/N) 1 in every slot >= 1.
    WordCombination canonicalize(const Word& w) const;
    WordCombination canonicalize(const WordCombination& c) const;
    /// Product of canonical words; the result is canonical.
    WordCombination multiply(const Word& a, const Word& b) const;
    /// The differential 1 (x) w, canonicalized.
    WordCombination differential(const Word& w) const;
    /// Matrix trace into the scalar algebra (N = 1), canonicalized there.
    WordCombination trace(const Word& w) const;
    /// Unit of M_N(C Gamma) as a degree-0 combination.
    WordCombination unit() const;

    MatrixUnit unit_at(int row, int col, const GroupElement& g) const { return {row, col, g}; }

private:
    GroupPtr group_;
    int n_;
};

/// Combination of words with complex coefficients (no manifold part).
class AlgebraForm {
public:
    explicit AlgebraForm(WordAlgebra alg) : alg_(std::move(alg)) {}

    const WordAlgebra& algebra() const { return alg_; }
    const WordCombination& terms() const { return terms_; }

    /// Adds c * w after canonicalization.
    void add(const Word& w, cplx c);
    void add(const WordCombination& wc, cplx scale = 1.0);

    AlgebraForm d() const;
    AlgebraForm trace() const;
    AlgebraForm component(int degree) const;
    double max_abs() const;
    /// max |coefficient| of the difference.
    double distance(const AlgebraForm& o) const;

    AlgebraForm& operator+=(const AlgebraForm& o);
    AlgebraForm& operator-=(const AlgebraForm& o);
    AlgebraForm& operator*=(cplx s);
    friend AlgebraForm operator+(AlgebraForm a, const AlgebraForm& b) { return a += b; }
    friend AlgebraForm operator-(AlgebraForm a, const AlgebraForm& b) { return a -= b; }
    friend AlgebraForm operator*(AlgebraForm a, cplx s) { return a *= s; }
    friend AlgebraForm operator*(cplx s, AlgebraForm a) { return a *= s; }
    friend AlgebraForm operator*(const AlgebraForm& a, const AlgebraForm& b);

private:
    WordAlgebra alg_;
    WordCombination terms_;
};

/// Square matrix over C Gamma.
class AlgebraMatrix {
public:
    AlgebraMatrix(GroupPtr group, int n);
    static AlgebraMatrix identity(GroupPtr group, int n);

    const GroupPtr& group() const { return group_; }
    int n() const { return n_; }
    GroupAlgebraElement& at(int r, int c) { return entries_[r * n_ + c]; }
    const GroupAlgebraElement& at(int r, int c) const { return entries_[r * n_ + c]; }

    AlgebraMatrix star() const;
    friend AlgebraMatrix operator*(const AlgebraMatrix& a, const AlgebraMatrix& b);
    friend AlgebraMatrix operator-(const AlgebraMatrix& a, const AlgebraMatrix& b);
    /// Max coefficient over entries.
    double max_abs() const;
    /// Degree-0 form sum_{r,c,g} a_{rc}(g) E_rc g.
    AlgebraForm as_form() const;

private:
    GroupPtr group_;
    int n_;
    std::vector<GroupAlgebraElement> entries_;
};

/// Element of Omega^p(M) (x) Omega_q(M_N(C Gamma)) truncated at algebra degree
/// K_alg: finite sum of (scalar grid form dx^I with jet coefficient) (x) word.
class MixedForm {
public:
    struct Key {
        FormMask mask = 0;
        Word word;
        auto operator<=>(const Key&) const = default;
        bool operator==(const Key&) const = default;
    };

    MixedForm(std::shared_ptr<const ManifoldGrid> grid, WordAlgebra alg, int cutoff);

    const std::shared_ptr<const ManifoldGrid>& grid() const { return grid_; }
    const WordAlgebra& algebra() const { return alg_; }
    int cutoff() const { return cutoff_; }
    /// True if some component was dropped because it exceeded the cutoff.
    bool dropped() const { return dropped_; }
    const std::map<Key, Field>& terms() const { return terms_; }

    /// Adds f dx^mask (x) w, canonicalizing w. Words above the cutoff are
    /// dropped and flagged.
    void add(FormMask mask, const Word& w, const Field& f);
    void add(FormMask mask, const WordCombination& wc, const Field& f);

    /// d_tot = d_M + (-1)^p d on bidegree (p, q).
    MixedForm d_tot() const;
    MixedForm d_manifold() const;
    /// (-1)^p d only.
    MixedForm d_algebra() const;
    /// Matrix trace into the scalar algebra.
    MixedForm graded_trace() const;
    /// Adjoint of a (0,0) form: (E_rc g f)* = E_cr g^{-1} conj(f).
    MixedForm star00() const;

    /// Components of manifold degree p and algebra degree q.
    MixedForm component(int p, int q) const;
    MixedForm algebra_component(int q) const;
    /// Total degree p + q of the homogeneous form; throws if mixed.
    int total_degree() const;

    /// Max over terms of |value| at the samples.
    double max_abs() const;
    void prune();

    MixedForm& operator+=(const MixedForm& o);
    MixedForm& operator-=(const MixedForm& o);
    MixedForm& operator*=(cplx s);
    friend MixedForm operator+(MixedForm a, const MixedForm& b) { return a += b; }
    friend MixedForm operator-(MixedForm a, const MixedForm& b) { return a -= b; }
    friend MixedForm operator*(MixedForm a, cplx s) { return a *= s; }
    friend MixedForm operator*(cplx s, MixedForm a) { return a *= s; }
    /// Graded product (a (x) w)(b (x) v) = (-1)^{|w||b|} (a ^ b) (x) (w v).
    friend MixedForm operator*(const MixedForm& a, const MixedForm& b);

    /// Constant (0,0) form c * 1 with jet order `order`.
    static MixedForm unit(std::shared_ptr<const ManifoldGrid> grid, WordAlgebra alg, int cutoff, int order,
                          cplx c = 1.0);

private:
    void check_compatible(const MixedForm& o) const;

    std::shared_ptr<const ManifoldGrid> grid_;
    WordAlgebra alg_;
    int cutoff_;
    bool dropped_ = false;
    std::map<Key, Field> terms_;

    friend MixedForm form_mul(const MixedForm&, const MixedForm&);
};

MixedForm form_dtot(const MixedForm& w);
MixedForm form_mul(const MixedForm& a, const MixedForm& b);
MixedForm graded_trace(const MixedForm& w);

}  // namespace ncindex
