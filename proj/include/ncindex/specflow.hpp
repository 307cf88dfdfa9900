#pragma once

// Spectral flow of paths of Hermitian matrices, the relative index of a pair
// of projections, the projection P(U) built from a cutoff triple, and the
// comparison ind(P, U P U*) against spfl on truncated Dirac operators.

#include <functional>
#include <vector>

#include "ncindex/field.hpp"
#include "ncindex/types.hpp"

namespace ncindex {

/// t -> A(t) on [0, 1], sampled adaptively.
struct SelfAdjointPath {
    std::function<MatrixXc(double)> at;
    /// Eigenvalues within delta_c of zero count as near-crossings; consecutive
    /// samples are refined until no eigenvalue moves more than delta_c / 2.
    double crossing_threshold = 0.25;
    int initial_samples = 16;
    /// Optional diagonal weights in [0, 1]: a crossing contributes the weight
    /// of its eigenvector, which excludes truncation-boundary modes.
    std::vector<double> weights;

    static SelfAdjointPath linear(const MatrixXc& a, const MatrixXc& b, double crossing_threshold = 0.25);
    SelfAdjointPath reversed() const;
};

struct SpectralFlowReport {
    int value = 0;
    /// Weighted crossing count before rounding.
    double weighted = 0;
    int up_crossings = 0;
    int down_crossings = 0;
    int intervals = 0;
    double min_step = 1.0;
    std::vector<double> crossing_times;
};

/// Signed count of eigenvalue crossings through zero, up minus down.
/// Throws EndpointDegenerate if an endpoint has an eigenvalue in
/// (-delta_c, delta_c) and CrossingUnresolved if refinement needs steps
/// below 1e-6.
SpectralFlowReport spectral_flow_report(const SelfAdjointPath& path);
int spectral_flow(const SelfAdjointPath& path);
/// Path a then b, each traversed at double speed.
SelfAdjointPath concatenate(const SelfAdjointPath& a, const SelfAdjointPath& b);

struct RelativeIndexReport {
    int value = 0;
    double weighted = 0;
    int kernel = 0;
    int cokernel = 0;
};

/// Index of the compression QP: ran P -> ran Q, with kernel and cokernel the
/// singular subspaces below eps. Optional diagonal weights count each
/// vector by its weight. Throws NotAProjection, and IllConditioned if a
/// singular value lies in [eps, 10 eps).
RelativeIndexReport relative_index_report(const MatrixXc& P, const MatrixXc& Q, double eps = 1e-6,
                                          const std::vector<double>& weights = {});
int relative_index(const MatrixXc& P, const MatrixXc& Q, double eps = 1e-6);

/// Cutoffs on [0, 1]: chi_0 = 1 near 0, chi_2 = 1 near 1, disjoint supports,
/// chi_1 = sqrt(1 - (chi_0 + chi_2)^2).
struct ChiTriple {
    Eigen::ArrayXd chi0, chi1, chi2;

    static ChiTriple standard(int grid_size);
    /// max |chi_1^2 + (chi_0 + chi_2)^2 - 1| and max |chi_0 chi_2|.
    double partition_residual() const;
    double overlap_residual() const;
};

/// P(U) = [[chi_1^2, chi_1 (chi_0 + chi_2 U)], [chi_1 (chi_0 + chi_2 U*), (chi_0 + chi_2)^2]]
/// at each grid point, as 2n x 2n matrices. `u` holds one unitary per grid
/// point, or a single constant unitary. Throws NotUnitary.
std::vector<MatrixXc> pu_projection(const std::vector<MatrixXc>& u, const ChiTriple& chi);
/// max over points of |P^2 - P| and |P* - P|.
double pu_projection_residual(const std::vector<MatrixXc>& p);

/// Truncated (1/i) d/dx on the Fourier modes -F..F: D = diag(k).
MatrixXc truncated_dirac(int fourier_cutoff);
/// Multiplication by e^{-2 pi i m x}: e_k -> e_{k-m}, cyclic on the window.
MatrixXc mode_shift(int fourier_cutoff, int m);
/// 1 on modes with |k| <= (1 - margin) F, 0 otherwise.
std::vector<double> interior_weights(int fourier_cutoff, double margin);

struct OddIndexReport {
    int spectral_flow = 0;
    int relative_index = 0;
    double spectral_flow_weighted = 0;
    double relative_index_weighted = 0;
    /// Fixed orientation s with ind(P, U P U*) = s * spfl under the
    /// conventions of spectral_flow and relative_index.
    int orientation = 0;
    bool match = false;
};

/// The global orientation: -1.
inline constexpr int kOddIndexOrientation = -1;

/// Compares ind(P, U P U*), P the non-negative spectral projection of D + A,
/// with the spectral flow of (1 - t)(D + A) + t U (D + A) U*. Both sides are
/// counted with interior weights. Throws PreconditionViolation if D + A is not
/// invertible.
OddIndexReport compare_odd_index(const MatrixXc& D, const MatrixXc& U, const MatrixXc& A,
                                 const std::vector<double>& weights, double crossing_threshold = 0.5,
                                 double eps = 1e-6);

}  // namespace ncindex
