#include "duio/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

namespace duio {

namespace {

using Cplx = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;

// Swaps the adjacent diagonal entries k, k+1 of the complex upper-triangular
// Schur factor T (updating U accordingly). Standard Givens-based exchange:
// conjugate by the 2x2 unitary whose first column is the eigenvector of the
// trailing eigenvalue.
void swap_adjacent(MatrixC& T, MatrixC& U, int k) {
    const Cplx t11 = T(k, k), t22 = T(k + 1, k + 1), t12 = T(k, k + 1);
    Cplx v0 = t12, v1 = t22 - t11;
    const double nv = std::sqrt(std::norm(v0) + std::norm(v1));
    if (nv == 0.0) return;  // identical eigenvalues, nothing to exchange
    v0 /= nv;
    v1 /= nv;
    Eigen::Matrix2cd Q2;
    Q2 << v0, -std::conj(v1), v1, std::conj(v0);
    T.middleRows(k, 2) = (Q2.adjoint() * T.middleRows(k, 2)).eval();
    T.middleCols(k, 2) = (T.middleCols(k, 2) * Q2).eval();
    U.middleCols(k, 2) = (U.middleCols(k, 2) * Q2).eval();
    T(k + 1, k) = 0.0;
}

// Ordered complex Schur decomposition: diagonal entries satisfying `select`
// are moved to the leading block. Returns the number selected.
int ordered_schur(const Matrix& A, const std::function<bool(Cplx)>& select,
                  MatrixC& T, MatrixC& U) {
    const int n = static_cast<int>(A.rows());
    Eigen::ComplexSchur<MatrixC> schur(A.cast<Cplx>(), true);
    if (schur.info() != Eigen::Success)
        throw NumericError("schur_no_convergence", "complex Schur iteration failed");
    T = schur.matrixT();
    U = schur.matrixU();
    int target = 0;
    for (;;) {
        int j = -1;
        for (int i = target; i < n; ++i) {
            if (select(T(i, i))) { j = i; break; }
        }
        if (j < 0) break;
        for (int i = j; i > target; --i) swap_adjacent(T, U, i - 1);
        ++target;
    }
    return target;
}

// Real orthonormal basis of the invariant subspace spanned by the leading k
// Schur vectors. The selection is closed under conjugation (real-part
// predicates), so the real dimension equals k.
Matrix realify_basis(const MatrixC& U, int k, double eps_rank) {
    const int n = static_cast<int>(U.rows());
    if (k == 0) return Matrix(n, 0);
    Matrix ri(n, 2 * k);
    ri << U.leftCols(k).real(), U.leftCols(k).imag();
    Eigen::JacobiSVD<Matrix> svd(ri, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double thresh = sv(0) * std::max<int>(n, 2 * k) * eps_rank;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++r;
    if (r != k)
        throw NumericError("invariant_subspace_realization",
                           "selected eigenvalue set is not conjugation-closed");
    return svd.matrixU().leftCols(k);
}

Matrix invariant_basis_for(const Matrix& A, const std::function<bool(Cplx)>& select,
                           double eps_rank) {
    const int n = static_cast<int>(A.rows());
    if (n == 0) return Matrix(0, 0);
    MatrixC T, U;
    const int k = ordered_schur(A, select, T, U);
    return realify_basis(U, k, eps_rank);
}

// Orthonormal basis of the image of the stacked reachability blocks
// [B, An B, An^2 B, ...] with An = A / |A|.
Matrix reachable_image(const Matrix& A, const Matrix& B, double eps_rank) {
    const int n = static_cast<int>(A.rows());
    if (n == 0 || B.cols() == 0) return Matrix(n, 0);
    const double s = spectral_norm(A);
    const Matrix An = s > 0 ? Matrix(A / s) : A;
    Matrix stack(n, n * B.cols());
    Matrix M = B;
    for (int k = 0; k < n; ++k) {
        stack.middleCols(k * B.cols(), B.cols()) = M;
        M = An * M;
    }
    Eigen::JacobiSVD<Matrix> svd(stack, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return Matrix(n, 0);
    const double thresh = sv(0) * n * eps_rank;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++r;
    return svd.matrixU().leftCols(r);
}

// Orthonormal completion: basis of the orthogonal complement of span(V).
Matrix orthogonal_complement(const Matrix& V, int n) {
    if (V.cols() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(V, Eigen::ComputeFullU);
    return svd.matrixU().rightCols(n - V.cols());
}

// Core Bartels-Stewart solve of G' P + P G = -Q on the complex Schur form of
// G. No definiteness checks; callers validate per their contracts.
Matrix lyapunov_core(const Matrix& G, const Matrix& Q) {
    const int n = static_cast<int>(G.rows());
    Eigen::ComplexSchur<MatrixC> schur(G.cast<Cplx>(), true);
    if (schur.info() != Eigen::Success)
        throw NumericError("schur_no_convergence", "complex Schur iteration failed");
    const MatrixC& T = schur.matrixT();
    const MatrixC& U = schur.matrixU();
    MatrixC Ct = -(U.adjoint() * Q.cast<Cplx>() * U);
    MatrixC X = MatrixC::Zero(n, n);
    // T^H X + X T = Ct, solved column by column; T^H + T(k,k) I is lower
    // triangular with diagonal conj(lambda_i) + lambda_k.
    MatrixC Th = T.adjoint();
    const double sep_floor = 1e-14 * (1.0 + T.norm());
    for (int k = 0; k < n; ++k) {
        MatrixC L = Th;
        L.diagonal().array() += T(k, k);
        for (int i = 0; i < n; ++i) {
            if (std::abs(L(i, i)) < sep_floor)
                throw NumericError("lyapunov_ill_separated",
                                   "spectrum separation below tolerance");
        }
        Eigen::VectorXcd rhs = Ct.col(k);
        if (k > 0) rhs -= X.leftCols(k) * T.block(0, k, k, 1);
        X.col(k) = L.triangularView<Eigen::Lower>().solve(rhs);
    }
    Matrix P = (U * X * U.adjoint()).real();
    return symmetrized(P);
}

double min_eigenvalue_sym(const Matrix& S) {
    if (S.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(S));
    return es.eigenvalues().minCoeff();
}

}  // namespace

int numerical_rank(const Matrix& m, double eps_rank) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0.0) return 0;
    const double thresh = sv(0) * std::max(m.rows(), m.cols()) * eps_rank;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++r;
    return r;
}

double spectral_norm(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

SubspaceBasis SubspaceBasis::full(int n) { return {n, Matrix::Identity(n, n)}; }
SubspaceBasis SubspaceBasis::empty(int n) { return {n, Matrix(n, 0)}; }

Matrix pseudo_inverse(const Matrix& m, const NumericOptions& opts) {
    if (m.rows() == 0 || m.cols() == 0) return m.transpose();
    if (!all_finite(m)) throw NumericError("non_finite", "pseudo_inverse input");
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double thresh =
        sv.size() ? sv(0) * std::max(m.rows(), m.cols()) * opts.eps_rank : 0.0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SubspaceBasis unobservable_subspace(const Matrix& C, const Matrix& A,
                                    const NumericOptions& opts) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || C.cols() != n)
        throw NumericError("dimension_mismatch", "unobservable_subspace");
    if (C.rows() == 0 || n == 0) return SubspaceBasis::full(n);
    const double s = spectral_norm(A);
    const Matrix An = s > 0 ? Matrix(A / s) : A;
    Matrix stack(C.rows() * n, n);
    Matrix M = C;
    for (int k = 0; k < n; ++k) {
        stack.middleRows(k * C.rows(), C.rows()) = M;
        M = M * An;
    }
    Eigen::JacobiSVD<Matrix> svd(stack, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double thresh = sv(0) * n * opts.eps_rank;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++r;
    return {n, svd.matrixV().rightCols(n - r)};
}

SubspaceBasis invariant_subspace(const Matrix& A, bool pick_unstable,
                                 double boundary_tol, const NumericOptions& opts) {
    if (A.rows() != A.cols())
        throw NumericError("dimension_mismatch", "invariant_subspace requires square A");
    auto select = [=](Cplx l) {
        return pick_unstable ? l.real() >= -boundary_tol : l.real() < -boundary_tol;
    };
    return {static_cast<int>(A.rows()), invariant_basis_for(A, select, opts.eps_rank)};
}

SpectralSplit spectral_split(const Matrix& A, double boundary_tol,
                             const NumericOptions& opts) {
    SpectralSplit out;
    out.stable = invariant_subspace(A, false, boundary_tol, opts);
    out.unstable = invariant_subspace(A, true, boundary_tol, opts);
    return out;
}

SubspaceBasis undetectable_subspace(const Matrix& C, const Matrix& A,
                                    const NumericOptions& opts) {
    SubspaceBasis uo = unobservable_subspace(C, A, opts);
    SubspaceBasis us = invariant_subspace(A, true, opts.boundary_tol, opts);
    return subspace_intersection({uo, us}, static_cast<int>(A.rows()), opts);
}

SubspaceBasis subspace_intersection(const std::vector<SubspaceBasis>& bases,
                                    int ambient_dim, const NumericOptions& opts) {
    if (bases.empty()) return SubspaceBasis::full(ambient_dim);
    for (const auto& b : bases) {
        if (b.ambient_dim != ambient_dim)
            throw NumericError("dimension_mismatch", "subspace_intersection");
        if (b.trivial()) return SubspaceBasis::empty(ambient_dim);
    }
    Matrix stack(ambient_dim * static_cast<int>(bases.size()), ambient_dim);
    for (size_t k = 0; k < bases.size(); ++k) {
        stack.middleRows(static_cast<int>(k) * ambient_dim, ambient_dim) =
            Matrix::Identity(ambient_dim, ambient_dim) -
            bases[k].basis * bases[k].basis.transpose();
    }
    Eigen::JacobiSVD<Matrix> svd(stack, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int null_dim = 0;
    for (int i = static_cast<int>(sv.size()) - 1; i >= 0; --i) {
        if (sv(i) <= opts.angle_tol) ++null_dim;
        else break;
    }
    return {ambient_dim, svd.matrixV().rightCols(null_dim)};
}

double subspace_distance(const SubspaceBasis& a, const SubspaceBasis& b) {
    const Matrix Pa = a.basis * a.basis.transpose();
    const Matrix Pb = b.basis * b.basis.transpose();
    return spectral_norm(Pa - Pb);
}

DetectabilityDecomposition detectability_decomposition(const Matrix& C,
                                                       const Matrix& A_bar,
                                                       const NumericOptions& opts) {
    const int n = static_cast<int>(A_bar.rows());
    SubspaceBasis ud = undetectable_subspace(C, A_bar, opts);
    DetectabilityDecomposition out;
    out.v = ud.dim();
    out.T_u = ud.basis;
    out.T_d = orthogonal_complement(out.T_u, n);
    out.A_dd = out.T_d.transpose() * A_bar * out.T_d;
    out.A_rd = out.T_u.transpose() * A_bar * out.T_d;
    out.A_uu = out.T_u.transpose() * A_bar * out.T_u;
    out.C_d = C * out.T_d;
    return out;
}

Matrix solve_lyapunov(const Matrix& G, const Matrix& Q, const NumericOptions& opts) {
    if (G.rows() != G.cols() || Q.rows() != Q.cols() || G.rows() != Q.rows())
        throw NumericError("dimension_mismatch", "solve_lyapunov");
    const int n = static_cast<int>(G.rows());
    if (n == 0) return Matrix(0, 0);
    if (spectral_abscissa(G) >= 0.0)
        throw NumericError("lyapunov_unstable", "G has spectrum in the closed right half-plane");
    Matrix P = lyapunov_core(G, symmetrized(Q));
    const Matrix resid = G.transpose() * P + P * G + symmetrized(Q);
    const double scale = Q.norm() + 2.0 * G.norm() * P.norm();
    if (resid.norm() > 1e-7 * std::max(1.0, scale))
        throw NumericError("lyapunov_residual", "solution residual above tolerance");
    (void)opts;
    return P;
}

Matrix solve_filter_riccati(const Matrix& A, const Matrix& C, const Matrix& Q,
                            const NumericOptions& opts) {
    const int n = static_cast<int>(A.rows());
    Matrix H(2 * n, 2 * n);
    H << A.transpose(), -C.transpose() * C, -Q, -A;
    auto select = [](Cplx l) { return l.real() < 0.0; };
    Matrix W = invariant_basis_for(H, select, opts.eps_rank);
    if (W.cols() != n)
        throw NumericError("riccati_no_stabilizing_solution",
                           "Hamiltonian stable subspace has wrong dimension");
    const Matrix X1 = W.topRows(n);
    const Matrix X2 = W.bottomRows(n);
    Eigen::FullPivLU<Matrix> lu(X1);
    lu.setThreshold(n * opts.eps_rank);
    if (!lu.isInvertible())
        throw NumericError("riccati_no_stabilizing_solution",
                           "stable subspace not a graph over the state space");
    Matrix P = symmetrized(X2 * lu.inverse());
    const Matrix resid =
        A * P + P * A.transpose() - P * C.transpose() * C * P + Q;
    const double scale = Q.norm() + 2.0 * A.norm() * P.norm() +
                         spectral_norm(C) * spectral_norm(C) * P.norm() * P.norm();
    if (resid.norm() > 1e-6 * std::max(1.0, scale))
        throw NumericError("riccati_residual", "solution residual above tolerance");
    return P;
}

Matrix stabilizing_output_injection(const Matrix& C_d, const Matrix& A_dd,
                                    const OutputInjectionOptions& inj,
                                    const NumericOptions& opts) {
    const int n = static_cast<int>(A_dd.rows());
    const int p = static_cast<int>(C_d.rows());
    if (n == 0) return Matrix(0, p);

    // PBH test on closed-right-half-plane eigenvalues.
    Eigen::EigenSolver<Matrix> es(A_dd);
    if (es.info() != Eigen::Success)
        throw NumericError("eigensolver_failure", "stabilizing_output_injection");
    for (int i = 0; i < n; ++i) {
        const Cplx l = es.eigenvalues()(i);
        if (l.real() < -opts.boundary_tol) continue;
        MatrixC pbh(n + p, n);
        pbh.topRows(n) = A_dd.cast<Cplx>() - l * MatrixC::Identity(n, n);
        pbh.bottomRows(p) = C_d.cast<Cplx>();
        Eigen::JacobiSVD<MatrixC> svd(pbh);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= sv(0) * n * opts.eps_rank)
            throw NumericError("not_detectable",
                               "unstable eigenvalue fails the PBH rank test");
    }
    if (spectral_abscissa(A_dd) <= -inj.margin) return Matrix::Zero(n, p);

    // Stable unobservable modes cap the achievable shift; stay clear of them
    // so the shifted pair remains stabilizable.
    double shift = inj.margin;
    SubspaceBasis uo = unobservable_subspace(C_d, A_dd, opts);
    if (!uo.trivial()) {
        const double sigma_u =
            spectral_abscissa(uo.basis.transpose() * A_dd * uo.basis);
        shift = std::min(shift, 0.45 * std::max(0.0, -sigma_u));
    }

    try {
        const Matrix As = A_dd + shift * Matrix::Identity(n, n);
        const Matrix P = solve_filter_riccati(
            As, C_d, inj.riccati_weight * Matrix::Identity(n, n), opts);
        Matrix K = P * C_d.transpose();
        if (spectral_abscissa(A_dd - K * C_d) < 0.0) return K;
    } catch (const NumericError&) {
        // fall through to the Gramian-based construction
    }

    // Fallback: Bass-type feedback on the controllable part of the slow
    // spectral block of the dual pair.
    const Matrix At = A_dd.transpose();
    const Matrix Bt = C_d.transpose();
    auto fast = [&](Cplx l) { return l.real() < -inj.margin; };
    Matrix Vf = invariant_basis_for(At, fast, opts.eps_rank);
    const int kf = static_cast<int>(Vf.cols());
    Matrix W(n, n);
    W << Vf, orthogonal_complement(Vf, n);
    const Matrix Att = W.transpose() * At * W;
    const Matrix A2 = Att.block(kf, kf, n - kf, n - kf);
    const Matrix B2 = (W.transpose() * Bt).bottomRows(n - kf);
    const Matrix Vc = reachable_image(A2, B2, opts.eps_rank);
    const int kc = static_cast<int>(Vc.cols());
    if (kc == 0)
        throw NumericError("not_detectable", "slow block entirely unobservable");
    Matrix Wc(n - kf, n - kf);
    Wc << Vc, orthogonal_complement(Vc, n - kf);
    const Matrix Ac = (Wc.transpose() * A2 * Wc).topLeftCorner(kc, kc);
    const Matrix Bc = (Wc.transpose() * B2).topRows(kc);
    const double depth = inj.margin + spectral_norm(Ac) + 1.0;
    const Matrix G = -(Ac + depth * Matrix::Identity(kc, kc));
    Matrix Z = lyapunov_core(G, 2.0 * Bc * Bc.transpose());
    if (min_eigenvalue_sym(Z) <= 0.0)
        throw NumericError("not_detectable",
                           "reachability Gramian of the slow block is singular");
    Matrix Fc = Bc.transpose() * Z.inverse();
    Matrix F2(p, n - kf);
    F2 << Fc, Matrix::Zero(p, n - kf - kc);
    F2 = F2 * Wc.transpose();
    Matrix F(p, n);
    F << Matrix::Zero(p, kf), F2;
    F = F * W.transpose();
    Matrix K = F.transpose();
    if (spectral_abscissa(A_dd - K * C_d) >= 0.0)
        throw NumericError("stabilization_failed",
                           "output injection did not stabilize the pair");
    return K;
}

bool is_hurwitz(const Matrix& M, double margin) {
    return spectral_abscissa(M) < -margin;
}

double spectral_abscissa(const Matrix& M) {
    if (M.rows() != M.cols())
        throw NumericError("dimension_mismatch", "spectral_abscissa");
    if (M.rows() == 0) return -std::numeric_limits<double>::infinity();
    Eigen::EigenSolver<Matrix> es(M, false);
    if (es.info() != Eigen::Success)
        throw NumericError("eigensolver_failure", "spectral_abscissa");
    return es.eigenvalues().real().maxCoeff();
}

bool is_negative_definite(const Matrix& S, double tol) {
    if (S.rows() != S.cols())
        throw NumericError("dimension_mismatch", "is_negative_definite");
    if (S.rows() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(S));
    return es.eigenvalues().maxCoeff() < -tol;
}

}  // namespace duio
