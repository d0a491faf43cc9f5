#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace duio {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown when an operation's mathematical precondition fails. `code` is a
// stable machine-readable tag ("lyapunov_unstable", "not_detectable", ...);
// `what()` carries the human-readable detail.
class NumericError : public std::runtime_error {
public:
    NumericError(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// Shared numerical policy. Rank decisions use sigma_max * n * eps_rank;
// eigenvalues with Re >= -boundary_tol count as unstable (closed right
// half-plane convention).
struct NumericOptions {
    double eps_rank = 1e-10;
    double boundary_tol = 1e-9;
    double angle_tol = 1e-8;        // subspace membership / intersection
    double residual_tol = 1e-8;     // generic identity residuals
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline Matrix symmetrized(const Matrix& s) { return 0.5 * (s + s.transpose()); }

// Numerical rank with the shared threshold rule.
int numerical_rank(const Matrix& m, double eps_rank = 1e-10);

// Spectral norm (largest singular value); 0 for empty matrices.
double spectral_norm(const Matrix& m);

// Kronecker product, dense.
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace duio
