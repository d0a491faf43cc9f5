#pragma once

// Existence checking and constructive synthesis of the distributed
// unknown-input observer gains, certificate computation (coupling gain bound
// and decay rate) and regression verification of externally supplied designs.

#include <optional>
#include <string>
#include <vector>

#include "duio/graph.hpp"
#include "duio/linalg.hpp"
#include "duio/model.hpp"

namespace duio {

enum class TopologyMode { fixed_undirected, switching, directed };

std::string to_string(TopologyMode mode);
TopologyMode topology_mode_from_string(const std::string& s);

struct NodeGains {
    Matrix H, M, N, L, K, P;
    Matrix Y, U, V;  // decoupling parameterization H = U + Y V
};

struct ObserverDesign {
    std::vector<NodeGains> nodes;
    double chi = 0.0;
    TopologyMode mode = TopologyMode::fixed_undirected;
};

struct DesignCertificate {
    std::vector<Matrix> Lambda;  // per-node symmetric Lambda_i
    bool lmi_ok = false;
    double chi_bound = 0.0;  // raw Theorem-style bound (before safety factor)
    double mu = 0.0;         // Lyapunov decay rate, 1/s
    double beta = 0.0;       // final scaling of the constructive synthesis

    Matrix lambda_block_diag() const;  // Nn x Nn
    Matrix lambda_stack() const;       // n x Nn
    Matrix lambda_sum() const;         // n x n
};

struct DesignOptions {
    Matrix Y_override;                  // shared default for Y_i; empty = zero
    std::vector<Matrix> Y_per_node;     // per-node overrides (empty entries = default)
    double beta0 = 1.0;
    int beta_max_doublings = 30;
    int beta_extra_doublings = 4;  // strengthen the certificate past first feasibility
    double chi_safety = 1.01;
    double piu_scale = 1.0;
    OutputInjectionOptions injection{0.5, 100.0};
    NumericOptions numeric{};
};

// rank(C_i B_bar_i) == rank(B_bar_i); vacuously true without unknown inputs.
bool check_rank_condition(const NodeIO& node, const NumericOptions& opts = {});

struct DecouplingSolution {
    Matrix H, U, V;
};

// General solution of (I - H C) B_bar = 0:  H = U + Y V with
// U = B_bar (C B_bar)^+ and V = I - C B_bar (C B_bar)^+.
// Throws "unsolvable_decoupling" when the rank condition fails.
DecouplingSolution compute_huv(const NodeIO& node, const Matrix& Y,
                               const NumericOptions& opts = {});

struct JointDetectabilityResult {
    bool ok = false;
    SubspaceBasis witness;  // intersection of the per-node undetectable subspaces
    std::vector<SubspaceBasis> per_node;
};

// Extensive joint detectability: triviality of the intersection of the
// undetectable subspaces of (C_i, A_i), A_i = (I - U_i C_i) A.
JointDetectabilityResult check_extensive_joint_detectability(
    const SystemModel& model, const NumericOptions& opts = {});

struct DesignResult {
    ObserverDesign design;
    DesignCertificate certificate;
};

// Constructive synthesis per the feasibility proof: per-node detectability
// decomposition, stabilizing injection on the detectable block, Lyapunov
// blocks P_id with Lambda_id = -beta I, beta doubled until the stacked LMI
// holds, then chi from the coupling bound. `graph_quantity` is lambda_2(L)
// for fixed undirected graphs, C(N) for switching ones and lambda_2(L_hat)/2
// for directed ones.
DesignResult design_gains(const SystemModel& model, TopologyMode mode,
                          double graph_quantity, const DesignOptions& opts = {});

// Lambda_i per the stability analysis, assembled from A, U_i, V_i and the
// products P_i Y_i, P_i K_i. Coincides with N_i' P_i + P_i N_i.
std::vector<Matrix> compute_lambda(const ObserverDesign& design,
                                   const SystemModel& model);

// Coupling bound: |sym(Lambda - Lambda_P' (sum Lambda_i)^{-1} Lambda_P)|_2
// divided by twice the mode's graph quantity, times the safety factor.
double compute_chi(const DesignCertificate& cert, double graph_quantity,
                   double safety = 1.01);

// mu = lambda_min(2 chi (L (x) I_n) - Lambda) / max_i lambda_max(P_i).
// Throws "chi_too_small" when the argument is not positive definite.
double compute_decay_rate(const ObserverDesign& design,
                          const DesignCertificate& cert, double chi,
                          const Matrix& L);

bool verify_lmi(const DesignCertificate& cert, double tol = 0.0);

struct NodeVerification {
    double decoupling = 0.0;  // |(I - H C) B_bar| / max(|B_bar|, 1), relative
    double m_residual = 0.0;  // M = I - H C
    double n_residual = 0.0;  // N = M A - K C
    double l_residual = 0.0;  // L = K + N H
    double p_definiteness = 0.0;  // min eigenvalue of sym(P)
    double n_abscissa = 0.0;      // diagnostic only
};

struct VerificationReport {
    std::vector<NodeVerification> nodes;
    std::vector<Matrix> recovered_K;  // filled where K was absent
    bool lmi_ok = false;
    double lmi_max_eig = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string failure;  // first violated condition, empty when pass
};

// Residual table for the four structure conditions plus the LMI verdict.
// Absent K_i (zero-size) are recovered by least squares from N_i.
VerificationReport verify_existing_design(const SystemModel& model,
                                          const ObserverDesign& design,
                                          double tol,
                                          const NumericOptions& opts = {});

// Least-squares K from N = (I - H C) A - K C; minimum-norm when C is
// row-rank deficient.
Matrix recover_K(const Matrix& N, const Matrix& H, const Matrix& A,
                 const Matrix& C, const NumericOptions& opts = {});

}  // namespace duio
