#pragma once

// Toeplitz index engine for C*-dynamical systems with a circle action:
// compressions P alpha(u) P to the non-negative Fourier modes of
// D = (1/i) d/dt, their tau-weighted index from truncated sections, the
// formula -(1/2 pi i) tau(u* delta(u)), and a determinant winding oracle.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ncindex/field.hpp"
#include "ncindex/types.hpp"

namespace ncindex {

/// A = C(S^1) with the rotation action alpha_t(f)(x) = f(x + t) and
/// tau(f) = int f, represented fibrewise on a circle grid.
class CircleFunctions {
public:
    /// Evaluates an element on a jet argument; the derivative of the jet is
    /// the generator delta(f) = f'.
    using Function = std::function<Field(const Field&)>;

    explicit CircleFunctions(int grid_size);

    const ManifoldGrid& grid() const { return grid_; }

    /// x -> e^{-2 pi i m x}.
    static Function character(int m);
    /// x -> exp(i(-2 pi m x + a sin 2 pi x)): unitary, homotopic to character(m).
    static Function perturbed_character(int m, double a);

    /// Values of alpha_t(f) at the grid points.
    Eigen::ArrayXcd alpha(const Function& f, double t) const;
    /// Values of delta(f).
    Eigen::ArrayXcd delta(const Function& f) const;
    cplx trace(const Eigen::ArrayXcd& values) const;

    /// max |delta(fg) - delta(f) g - f delta(g)|.
    double derivation_residual(const Function& f, const Function& g) const;
    /// max over t of |tau(alpha_t f) - tau(f)|.
    double invariance_residual(const Function& f, const std::vector<double>& ts) const;

private:
    ManifoldGrid grid_;
};

/// Rational rotation algebra A_{p/q}: V^n U^m = lambda^{-nm} U^m V^n with
/// lambda = e^{2 pi i p/q}, represented by q x q clock (U) and shift (V)
/// matrices, alpha_t(U) = U, alpha_t(V) = e^{2 pi i t} V. The trace is the
/// coefficient of U^0 V^0, i.e. Tr / q averaged over the twisted
/// representations U -> z C, V -> w S; the index uses the fibre z = w = 1.
class RotationAlgebra {
public:
    /// sum c_{m,n} U^m V^n.
    using Element = std::map<std::pair<int, int>, cplx>;

    RotationAlgebra(int p, int q);

    int p() const { return p_; }
    int q() const { return q_; }

    static Element monomial(int m, int n, cplx c = 1.0);
    Element U() const { return monomial(1, 0); }
    Element V() const { return monomial(0, 1); }

    Element multiply(const Element& a, const Element& b) const;
    Element star(const Element& a) const;
    Element delta(const Element& a) const;
    Element alpha(const Element& a, double t) const;
    Element add(const Element& a, const Element& b, cplx s = 1.0) const;

    MatrixXc represent(const Element& a) const;
    cplx trace(const Element& a) const;

    /// |delta(ab) - delta(a) b - a delta(b)| in the representation.
    double derivation_residual(const Element& a, const Element& b) const;
    double trace_residual(const Element& a, const Element& b) const;
    double invariance_residual(const Element& a, const std::vector<double>& ts) const;

private:
    int p_;
    int q_;
    cplx lambda_;
};

/// Compression P alpha(u) P truncated to modes 0..F_c, one block matrix per
/// fibre of the representation.
struct ToeplitzProblem {
    int fourier_cutoff = 0;
    int rep_dim = 1;
    double kernel_threshold = 1e-6;
    /// Largest |n| with a non-negligible Fourier mode of t -> alpha_t(u).
    int bandwidth = 0;
    /// tau = sum_f weight_f * Tr(rho_f(.)) / rep_dim.
    std::vector<double> weights;
    std::vector<MatrixXc> compressions;
};

ToeplitzProblem assemble_toeplitz(const CircleFunctions& sys, const CircleFunctions::Function& u, int fourier_cutoff,
                                  double kernel_threshold = 1e-6);
ToeplitzProblem assemble_toeplitz(const RotationAlgebra& sys, const RotationAlgebra::Element& u, int fourier_cutoff,
                                  double kernel_threshold = 1e-6);

struct TauIndexReport {
    double value = 0;
    /// Smallest singular value at or above the threshold, over the threshold.
    double gap_ratio = 0;
    int kernel_vectors = 0;
    int cokernel_vectors = 0;
};

/// tau-weighted (dim ker - dim coker): kernel and cokernel are the singular
/// subspaces below the threshold, counted by their weight on the lower half
/// of the modes (truncation artefacts live at the top modes). Throws
/// InsufficientTruncation if F_c < 8 * bandwidth and IllConditioned if a
/// singular value lies in [eps_k, 10 eps_k).
TauIndexReport tau_index_report(const ToeplitzProblem& tp);
double tau_index(const ToeplitzProblem& tp);

struct DynsysValue {
    cplx value;        ///< -(1/2 pi i) tau(u* delta(u))
    cplx alternative;  ///< (1/2 pi i) tau(u delta(u*))
};

DynsysValue dynsys_formula(const CircleFunctions& sys, const CircleFunctions::Function& u);
DynsysValue dynsys_formula(const RotationAlgebra& sys, const RotationAlgebra::Element& u);

/// Winding number of det u(t) over t in [0, 1] from `samples` equally spaced
/// samples. Throws PhaseJump if a step of the determinant phase exceeds pi/2.
int winding_oracle(const std::function<MatrixXc(double)>& loop, int samples);

/// -tau-weighted winding of t -> alpha_t(u): the orientation that maps
/// u = e^{-2 pi i x} to +1.
double sign_adjusted_winding(const CircleFunctions& sys, const CircleFunctions::Function& u, int samples);
double sign_adjusted_winding(const RotationAlgebra& sys, const RotationAlgebra::Element& u, int samples);

}  // namespace ncindex
