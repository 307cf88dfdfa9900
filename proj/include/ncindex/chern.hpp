#pragma once

// Karoubi Chern character forms of projections and unitaries over
// M_N(C Gamma) with grid-function coefficients, closedness and homotopy
// checks, the Bott projector, and constructions of projections and
// unitaries over C(Z/k) from their character blocks.

#include <functional>
#include <random>
#include <vector>

#include "ncindex/cyclic.hpp"
#include "ncindex/nc_forms.hpp"

namespace ncindex {

/// N x N matrix whose entries are scalar (N = 1) mixed forms. Products use
/// the entrywise form product, so tr P (dP)^{2k} is computed without
/// materializing words in matrix units.
class FormMatrix {
public:
    FormMatrix(std::shared_ptr<const ManifoldGrid> grid, WordAlgebra scalar, int cutoff, int n);

    /// Splits a matrix of functions (algebra degree 0) into entries.
    static FormMatrix from_form(const MixedForm& a);
    static FormMatrix identity(std::shared_ptr<const ManifoldGrid> grid, WordAlgebra scalar, int cutoff, int n,
                               int order);

    int n() const { return n_; }
    const WordAlgebra& scalar_algebra() const { return scalar_; }
    MixedForm& at(int r, int c) { return entries_[r * n_ + c]; }
    const MixedForm& at(int r, int c) const { return entries_[r * n_ + c]; }

    /// Reassembles an N x N matrix of degree-0 words over `alg` (alg.n() == n()).
    MixedForm to_form(const WordAlgebra& alg) const;

    FormMatrix d_tot() const;
    FormMatrix star00() const;
    MixedForm trace() const;
    double max_abs() const;

    friend FormMatrix operator*(const FormMatrix& a, const FormMatrix& b);
    friend FormMatrix operator-(const FormMatrix& a, const FormMatrix& b);

private:
    std::shared_ptr<const ManifoldGrid> grid_;
    WordAlgebra scalar_;
    int cutoff_;
    int n_;
    std::vector<MixedForm> entries_;
};

/// max(|P^2 - P|, |P* - P|) over coefficients and samples.
double projection_residual(const MixedForm& p);
/// max(|u* u - 1|, |u u* - 1|).
double unitary_residual(const MixedForm& u);
/// Smallest jet order among the coefficients (0 for the zero form).
int jet_order(const MixedForm& a);

/// sum_{k <= k_max} (-1)^k / ((2 pi i)^k k!) tr P (d_tot P)^{2k}, as a
/// scalar (N = 1) form. Throws NotAProjection if the residual exceeds 1e-8.
MixedForm chern_even(const MixedForm& p, int k_max);

/// sum_{k=1}^{k_max} (-1/(2 pi i))^k (k-1)!/(2k-1)! tr u*(d_tot u)((d_tot u*)(d_tot u))^{k-1}.
/// Throws NotUnitary if the residual exceeds 1e-8.
MixedForm chern_odd(const MixedForm& u, int k_max);

/// int_M <phi, w>: the pairing's top-degree manifold component, integrated.
cplx pair_integrated(const CyclicCochain& phi, const MixedForm& w);

/// Max over cochains and samples of |<phi, d_tot w>|. For closed normalized
/// phi this is the observable content of closedness of w, since d_tot w
/// vanishes modulo graded commutators only.
double closedness_defect(const MixedForm& w, const std::vector<CyclicCochain>& cocycles);

/// Sampled family of projections t -> P(t), t in [0, 1].
struct ProjectionPath {
    std::vector<double> times;
    std::vector<MixedForm> samples;
    std::vector<double> residuals;

    /// Throws PreconditionViolation if some sample has residual > 1e-8.
    static ProjectionPath sample(const std::function<MixedForm(double)>& p, int count);
};

/// int_M <phi, ch(P(1)) - ch(P(0))> using the Chern component of degree
/// dim M + deg phi.
cplx chern_homotopy_defect(const ProjectionPath& path, const CyclicCochain& phi);

/// Bott projector (1 + n . sigma)/2 on the (0,1)^2 chart grid of size n x n,
/// trivial group, N = 2, algebra cutoff 0. Normalized so that int ch = +1.
MixedForm bott_projector(int n, int order);

/// Block diagonal sum of two matrices of functions.
MixedForm direct_sum(const MixedForm& a, const MixedForm& b);

/// Values of a matrix of functions at one grid sample.
AlgebraMatrix sample_matrix(const MixedForm& a, int sample = 0);

/// Constant matrix of functions with coefficients from an algebra matrix.
MixedForm constant_matrix(std::shared_ptr<const ManifoldGrid> grid, int cutoff, const AlgebraMatrix& a, int order);

/// Rank-0, rank-1 (v v*, v = (cos theta, sin theta e^{i phi})) or rank-2
/// projection in the fibre of one character of Z/k.
struct CharacterBlock {
    int rank = 1;
    Field theta;
    Field phi;
};

/// u_j = R diag(e^{i alpha}, e^{i beta}) R*, R the rotation by (theta, phi).
struct UnitaryBlock {
    Field alpha, beta, theta, phi;
};

/// 2 x 2 matrix over C(Z/k) whose j-th character fibre is the given block
/// (inverse Fourier transform in the group variable).
MixedForm character_projection(std::shared_ptr<const ManifoldGrid> grid, GroupPtr group, int cutoff,
                               const std::vector<CharacterBlock>& blocks);
MixedForm character_unitary(std::shared_ptr<const ManifoldGrid> grid, GroupPtr group, int cutoff,
                            const std::vector<UnitaryBlock>& blocks);

/// Random smooth blocks: parameters a + b sin(2 pi (x + c)) per axis.
MixedForm random_character_projection(std::mt19937_64& rng, std::shared_ptr<const ManifoldGrid> grid, GroupPtr group,
                                      int cutoff, int order);
MixedForm random_character_unitary(std::mt19937_64& rng, std::shared_ptr<const ManifoldGrid> grid, GroupPtr group,
                                   int cutoff, int order);

}  // namespace ncindex
