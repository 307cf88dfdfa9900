#pragma once

// Covers of the circle by arcs with deck data, the projection
// P = (chi_i chi_j g_ij) over C Gamma, the form omega_tau built from the
// lifted partition of unity, and the comparison between c_tau(ch P) and
// omega_tau.

#include <string>
#include <vector>

#include "ncindex/chern.hpp"
#include "ncindex/cyclic.hpp"

namespace ncindex {

/// Smooth steps q: [0, 1] -> [0, 1] used on each overlap, where
/// chi_left = cos(pi q / 2) and chi_right = sin(pi q / 2).
enum class BumpFamily { Mollifier, RaisedCosine, PolynomialSpline };

BumpFamily parse_bump_family(const std::string& name);
std::string to_string(BumpFamily f);
/// q(t) with q = 0 for t <= 0 and q = 1 for t >= 1.
Field bump_step(BumpFamily f, const Field& t);

/// Open arc (start, end) of the circle R/Z, with end - start < 1.
struct Arc {
    double start = 0;
    double end = 0;
};

/// Cyclically ordered arcs; deck[i] is the integer g_{i,i+1} on the overlap
/// of arc i and arc i+1 (indices mod N). A single arc covering the whole
/// circle with deck {0} is the trivial cover.
struct CoverSpec {
    std::vector<Arc> arcs;
    std::vector<int> deck;
    BumpFamily bump = BumpFamily::Mollifier;

    /// Arcs centred at 0, 1/3, 2/3 with half-width 1/4 (overlaps of width
    /// 1/6); deck 0 except g_{2,0} = wrap.
    static CoverSpec three_arc(BumpFamily bump = BumpFamily::Mollifier, int wrap = 1);
    static CoverSpec trivial();
};

/// A cover sampled on a circle grid.
struct CoverData {
    std::shared_ptr<const ManifoldGrid> grid;
    GroupPtr group;
    CoverSpec spec;
    std::vector<Field> chi;
    /// Orientation eps = sum of deck integers (+-1, or 0 for the trivial
    /// cover); the deck action on the line is x -> x - eps g.
    int orientation = 0;
    /// lift[i][p]: the deck integer g such that x_p - eps g lies in the
    /// chosen lift of arc i, or kOutside.
    std::vector<std::vector<int>> lift;

    static constexpr int kOutside = std::numeric_limits<int>::min();

    /// max |sum chi_i^2 - 1| over samples.
    double partition_residual() const;
    /// g_ij as an integer, or kOutside if chi_i chi_j vanishes identically.
    int deck(int i, int j) const;
};

/// Samples the cover's bump functions; jets carry `order` derivatives.
/// Throws BadCover for inconsistent arc or deck data.
CoverData make_cover(const CoverSpec& spec, int grid_size, GroupPtr group, int order = 2);

/// Matrix of functions P_ij = chi_i chi_j g_ij. Throws BadCover if the
/// partition residual exceeds 1e-12 or the deck data is inconsistent.
MixedForm build_mf_projection(const CoverData& cover, int cutoff = 2);

/// omega_tau = sum_g tau(e, g) R_g^* d_M h for h = sum_i chi~_i^2 on the lifts.
/// Throws DegreeMismatch unless deg tau <= 1.
ManifoldForm omega_tau(const CoverData& cover, const GroupCocycle& tau);

struct ChernOmegaReport {
    int degree = 1;
    /// (-1)^{n(n-1)/2} of the stated identity.
    int stated_sign = 1;
    /// Sign s minimizing |c_tau(ch P) - s ((2 pi i)^n n!)^{-1} omega_tau|.
    int observed_sign = 1;
    double residual = 0;        ///< with the observed sign
    double residual_other = 0;  ///< with the opposite sign
    double lhs_max = 0;
    double rhs_max = 0;
    /// max |c_sigma(tr P dP dP)| for the auxiliary degree-2 cocycle d_Gamma sigma.
    double flat_connection = 0;
    cplx lhs_integral = 0;
    cplx omega_integral = 0;
    double projection_residual = 0;
};

/// Compares c_tau(ch P) with ((2 pi i)^n n!)^{-1} omega_tau on the grid.
ChernOmegaReport compare_chern_omega(const CoverData& cover, const GroupCocycle& tau);

/// |int c_{tau + s}(ch P) - int c_tau(ch P)| for the symmetric invariant
/// perturbation s(a, b) = (b - a)^2 (non-alternating, same values on the
/// antisymmetric part).
double antisymmetry_defect(const CoverData& cover, const GroupCocycle& tau);

struct HigherIndexRhs {
    cplx value = 0;
    int sign_exponent = 0;  ///< k = dim(dim + 1)/2 + n(n - 1)/2
    cplx omega_integral = 0;
};

/// (-1)^k ((2 pi i)^n n!)^{-1} * symbol_integer * int omega_tau.
/// Throws UnsupportedManifold for dim M > 1.
HigherIndexRhs higher_index_rhs(const CoverData& cover, const GroupCocycle& tau, int symbol_integer);

/// tau(m, k) = k - m on Z.
GroupCocycle linear_cocycle(GroupPtr z);

}  // namespace ncindex
