#pragma once

// Exact arithmetic in the complex group algebra of a finitely described
// group, together with the word-length derivation [D_l, .] on l^2 of a
// finite ball.

#include <compare>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ncindex/types.hpp"

namespace ncindex {

enum class GroupFamily { Lattice, Cyclic, Free };

/// A group element in the normal form of its family:
///  - Lattice Z^d: the exponent vector (size d)
///  - Cyclic Z/k: a single residue in [0, k)
///  - Free group: the reduced word, letters +-(i+1) for generator i
struct GroupElement {
    std::vector<int> word;

    auto operator<=>(const GroupElement&) const = default;
    bool operator==(const GroupElement&) const = default;
};

class GroupSpec {
public:
    static constexpr int kUnbounded = std::numeric_limits<int>::max();

    static GroupSpec lattice(int dim, int radius = kUnbounded);
    static GroupSpec cyclic(int order, int radius = kUnbounded);
    static GroupSpec free(int rank, int radius = 6);
    /// The trivial group, modelled as Z/1.
    static GroupSpec trivial() { return cyclic(1); }

    GroupFamily family() const { return family_; }
    /// d for Z^d, k for Z/k, r for the free group of rank r.
    int rank() const { return rank_; }
    /// Maximal word length retained by products (truncation radius R).
    int radius() const { return radius_; }
    bool is_finite() const { return family_ == GroupFamily::Cyclic; }

    GroupElement identity() const;
    int num_generators() const;
    GroupElement generator(int i) const;

    GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
    GroupElement inverse(const GroupElement& a) const;
    GroupElement power(const GroupElement& a, int n) const;
    int length(const GroupElement& a) const;
    bool is_identity(const GroupElement& a) const { return a == identity(); }

    /// Element of Z^d / Z/k from integers (residues are reduced mod k).
    GroupElement element(std::vector<int> coords) const;

    /// All elements of word length <= r, ordered by (length, normal form).
    std::vector<GroupElement> ball(int r) const;
    /// All group elements; only for finite groups.
    std::vector<GroupElement> elements() const;

    std::string to_string(const GroupElement& g) const;

    bool operator==(const GroupSpec&) const = default;

private:
    GroupSpec(GroupFamily f, int rank, int radius) : family_(f), rank_(rank), radius_(radius) {}

    GroupFamily family_;
    int rank_;
    int radius_;
};

using GroupPtr = std::shared_ptr<const GroupSpec>;

inline GroupPtr make_group(GroupSpec spec) { return std::make_shared<const GroupSpec>(spec); }

/// Finite complex combination of group elements. Terms with an exactly zero
/// coefficient are never stored.
class GroupAlgebraElement {
public:
    explicit GroupAlgebraElement(GroupPtr group);

    static GroupAlgebraElement basis(GroupPtr group, const GroupElement& g, cplx c = 1.0);
    static GroupAlgebraElement unit(GroupPtr group, cplx c = 1.0);

    const GroupPtr& group() const { return group_; }
    const std::map<GroupElement, cplx>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const GroupElement& g, cplx c);
    cplx coefficient(const GroupElement& g) const;

    GroupAlgebraElement star() const;
    /// Sum of absolute values of coefficients; an upper bound for the
    /// operator norm of left multiplication on l^2.
    double l1_norm() const;
    /// Sum |c_g| l(g); an upper bound for the operator norm of [D_l, a].
    double weighted_l1_norm() const;
    /// Largest word length in the support (0 for the zero element).
    int support_radius() const;

    GroupAlgebraElement& operator+=(const GroupAlgebraElement& b);
    GroupAlgebraElement& operator-=(const GroupAlgebraElement& b);
    GroupAlgebraElement& operator*=(cplx s);

    friend GroupAlgebraElement operator+(GroupAlgebraElement a, const GroupAlgebraElement& b) { return a += b; }
    friend GroupAlgebraElement operator-(GroupAlgebraElement a, const GroupAlgebraElement& b) { return a -= b; }
    friend GroupAlgebraElement operator*(GroupAlgebraElement a, cplx s) { return a *= s; }
    friend GroupAlgebraElement operator*(cplx s, GroupAlgebraElement a) { return a *= s; }

    /// Max coefficient difference; 0 when both sides have the same support.
    double distance(const GroupAlgebraElement& b) const;

private:
    GroupPtr group_;
    std::map<GroupElement, cplx> terms_;
};

/// Convolution product. Throws TruncationOverflow if a product word is
/// longer than the group's truncation radius.
GroupAlgebraElement ga_mul(const GroupAlgebraElement& a, const GroupAlgebraElement& b);
GroupAlgebraElement operator*(const GroupAlgebraElement& a, const GroupAlgebraElement& b);

/// Canonical trace: the coefficient of the identity.
cplx trace_e(const GroupAlgebraElement& a);

/// Ordered basis of l^2(B_R).
struct BallBasis {
    int radius = 0;
    std::vector<GroupElement> elements;
    std::map<GroupElement, int> index;

    static BallBasis build(const GroupSpec& group, int radius);
    int size() const { return static_cast<int>(elements.size()); }
};

/// Matrix of a bounded operator compressed to the finite span of a ball.
/// Norms computed from it are lower bounds for the norms on l^2(Gamma).
struct TruncatedDerivationRep {
    BallBasis ball;
    MatrixXc matrix;

    double norm_lower_bound() const;
};

/// Compression of left multiplication by `a` to span(B_R); column h holds
/// the image of h, restricted to B_R.
MatrixXc left_regular(const GroupAlgebraElement& a, const BallBasis& ball);
/// Diagonal of D_l on span(B_R).
Eigen::VectorXd word_length_diagonal(const GroupSpec& group, const BallBasis& ball);

/// [D_l, a] on span(B_R); entry (gh, h) equals a_g (l(gh) - l(h)).
TruncatedDerivationRep delta_word_length(const GroupAlgebraElement& a, int radius);

/// Largest singular value.
double operator_norm(const MatrixXc& m);

/// The seminorm tower ||T||_0 = ||T||, ||T||_i = ||T||_{i-1} + ||[D_l,T]||_{i-1},
/// evaluated on a ball compression (lower bounds).
double derivation_seminorm(const MatrixXc& t, const Eigen::VectorXd& lengths, int order);

struct NeumannOptions {
    double tolerance = 1e-12;
    int max_terms = 2000;
    /// Number of initial powers for which the derivation growth bound is checked.
    int check_terms = 8;
    /// Ball radius used for the growth check; clipped to the group's radius.
    int check_radius = 4;
};

struct NeumannGrowthCheck {
    int power = 0;
    double lhs = 0.0;  ///< ||[D_l,(1-x)^n]|| on the check ball
    double rhs = 0.0;  ///< n ||1-x||^{n-1} ||[D_l,1-x]|| with certified upper bounds
};

struct NeumannResult {
    GroupAlgebraElement inverse;
    int terms = 0;
    double contraction = 0.0;  ///< l1 bound of ||1 - x||
    double residual = 0.0;     ///< l1 norm of x * inverse - e
    std::vector<NeumannGrowthCheck> growth;

    bool growth_bound_holds() const;
};

/// Inverse of x by the series sum (1-x)^n. Requires the certified bound
/// ||1-x||_{l1} < 1; throws NotInvertibleInBudget otherwise or when the
/// tolerance is not met within the term budget.
NeumannResult neumann_inverse(const GroupAlgebraElement& x, const NeumannOptions& options = {});

}  // namespace ncindex
