#pragma once

// Geometric / numerical linear-algebra kernel: invariant subspaces, spectral
// splits, detectability decompositions and the matrix-equation solvers used
// by the observer designer. All functions are pure; safe to call concurrently.

#include <vector>

#include "duio/types.hpp"

namespace duio {

// Orthonormal basis of a subspace of R^{ambient_dim}. Zero columns encode the
// trivial subspace.
struct SubspaceBasis {
    int ambient_dim = 0;
    Matrix basis;  // ambient_dim x dim, orthonormal columns

    int dim() const { return static_cast<int>(basis.cols()); }
    bool trivial() const { return basis.cols() == 0; }

    static SubspaceBasis full(int n);
    static SubspaceBasis empty(int n);
};

// Invariant-subspace split of a square matrix by eigenvalue real part.
// stable: Re s < -boundary_tol, unstable: Re s >= -boundary_tol.
struct SpectralSplit {
    SubspaceBasis stable;
    SubspaceBasis unstable;
};

// Orthogonal similarity T = [T_d T_u] block-triangularizing A_bar with the
// undetectable subspace trailing:
//   T' A_bar T = [A_dd  0   ]        C T = [C_d  0]
//                [A_rd  A_uu]
struct DetectabilityDecomposition {
    Matrix T_d;   // n x (n-v)
    Matrix T_u;   // n x v
    Matrix A_dd;
    Matrix A_rd;
    Matrix A_uu;
    Matrix C_d;
    int v = 0;    // undetectable dimension
};

// Moore-Penrose pseudo-inverse via SVD; zero matrix maps to its transpose.
Matrix pseudo_inverse(const Matrix& m, const NumericOptions& opts = {});

// Orthonormal basis of the intersection of kernels of C*A^k, k = 0..n-1
// (powers taken of A scaled to unit spectral norm; the kernel is unchanged
// and the rank decision stays well conditioned).
SubspaceBasis unobservable_subspace(const Matrix& C, const Matrix& A,
                                    const NumericOptions& opts = {});

// Invariant-subspace split; eigenvalues with Re s >= -boundary_tol are
// classified unstable (imaginary axis included).
SpectralSplit spectral_split(const Matrix& A, double boundary_tol = 1e-9,
                             const NumericOptions& opts = {});

// Orthonormal basis of the A-invariant subspace for eigenvalues selected by
// `pick_unstable`: true -> Re s >= -boundary_tol, false -> Re s < -boundary_tol.
SubspaceBasis invariant_subspace(const Matrix& A, bool pick_unstable,
                                 double boundary_tol = 1e-9,
                                 const NumericOptions& opts = {});

// Intersection of the unobservable subspace with the unstable invariant
// subspace.
SubspaceBasis undetectable_subspace(const Matrix& C, const Matrix& A,
                                    const NumericOptions& opts = {});

// Intersection computed from the null space of stacked orthogonal-complement
// projectors. Empty list -> full space.
SubspaceBasis subspace_intersection(const std::vector<SubspaceBasis>& bases,
                                    int ambient_dim,
                                    const NumericOptions& opts = {});

// sin of the largest principal angle between two subspaces
// (spectral norm of the projector difference).
double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b);

DetectabilityDecomposition detectability_decomposition(
    const Matrix& C, const Matrix& A_bar, const NumericOptions& opts = {});

// Unique symmetric P > 0 with G' P + P G = -Q for Hurwitz G and Q > 0.
// Bartels-Stewart on the complex Schur form. Throws "lyapunov_unstable" if G
// is not Hurwitz and a diagnostic error on near-singular spectrum separation.
Matrix solve_lyapunov(const Matrix& G, const Matrix& Q,
                      const NumericOptions& opts = {});

// Solves the filter-type algebraic Riccati equation
//   A P + P A' - P C' C P + Q = 0
// for the stabilizing P >= 0 via the stable invariant subspace of the
// Hamiltonian. Requires (A', C') stabilizable and Q > 0.
Matrix solve_filter_riccati(const Matrix& A, const Matrix& C, const Matrix& Q,
                            const NumericOptions& opts = {});

struct OutputInjectionOptions {
    double margin = 0.5;         // target spectral abscissa of A - K C
    double riccati_weight = 100; // Q = weight * I in the shifted Riccati
};

// K_d with A_dd - K_d C_d Hurwitz. Modes that are unobservable but stable are
// immovable by any output injection; the posted margin is met whenever the
// movable spectrum allows it. Throws "not_detectable" (PBH test on
// closed-right-half-plane eigenvalues) when no stabilizing injection exists.
Matrix stabilizing_output_injection(const Matrix& C_d, const Matrix& A_dd,
                                    const OutputInjectionOptions& inj = {},
                                    const NumericOptions& opts = {});

// max Re eig(M) < -margin. Throws a diagnostic error on solver failure.
bool is_hurwitz(const Matrix& M, double margin = 0.0);

// Largest real part of the spectrum.
double spectral_abscissa(const Matrix& M);

// max eig of the symmetrized S  <  -tol.
bool is_negative_definite(const Matrix& S, double tol = 0.0);

}  // namespace duio
