#include "duio/design.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace duio {

std::string to_string(TopologyMode mode) {
    switch (mode) {
        case TopologyMode::fixed_undirected: return "undirected";
        case TopologyMode::switching: return "switching";
        case TopologyMode::directed: return "directed";
    }
    return "undirected";
}

TopologyMode topology_mode_from_string(const std::string& s) {
    if (s == "undirected") return TopologyMode::fixed_undirected;
    if (s == "switching") return TopologyMode::switching;
    if (s == "directed") return TopologyMode::directed;
    throw NumericError("invalid_mode", "unknown topology mode '" + s + "'");
}

Matrix DesignCertificate::lambda_block_diag() const {
    const int N = static_cast<int>(Lambda.size());
    const int n = N ? static_cast<int>(Lambda[0].rows()) : 0;
    Matrix out = Matrix::Zero(N * n, N * n);
    for (int i = 0; i < N; ++i) out.block(i * n, i * n, n, n) = Lambda[i];
    return out;
}

Matrix DesignCertificate::lambda_stack() const {
    const int N = static_cast<int>(Lambda.size());
    const int n = N ? static_cast<int>(Lambda[0].rows()) : 0;
    Matrix out(n, N * n);
    for (int i = 0; i < N; ++i) out.middleCols(i * n, n) = Lambda[i];
    return out;
}

Matrix DesignCertificate::lambda_sum() const {
    if (Lambda.empty()) return Matrix(0, 0);
    Matrix out = Lambda[0];
    for (size_t i = 1; i < Lambda.size(); ++i) out += Lambda[i];
    return out;
}

bool check_rank_condition(const NodeIO& node, const NumericOptions& opts) {
    if (node.B_bar.cols() == 0) return true;
    const Matrix CB = node.C * node.B_bar;
    return numerical_rank(CB, opts.eps_rank) ==
           numerical_rank(node.B_bar, opts.eps_rank);
}

DecouplingSolution compute_huv(const NodeIO& node, const Matrix& Y,
                               const NumericOptions& opts) {
    if (!check_rank_condition(node, opts))
        throw NumericError("unsolvable_decoupling",
                           "rank(C B_bar) != rank(B_bar)");
    const int n = static_cast<int>(node.C.cols());
    const int p = static_cast<int>(node.C.rows());
    DecouplingSolution sol;
    const Matrix CB = node.C * node.B_bar;
    const Matrix CBp = pseudo_inverse(CB, opts);
    sol.U = node.B_bar * CBp;
    sol.V = Matrix::Identity(p, p) - CB * CBp;
    Matrix Yi = Y;
    if (Yi.size() == 0) Yi = Matrix::Zero(n, p);
    if (Yi.rows() != n || Yi.cols() != p)
        throw NumericError("dimension_mismatch", "Y must be n x p_i");
    sol.H = sol.U + Yi * sol.V;
    return sol;
}

JointDetectabilityResult check_extensive_joint_detectability(
    const SystemModel& model, const NumericOptions& opts) {
    const int n = model.state_dim();
    JointDetectabilityResult out;
    for (const NodeIO& node : model.nodes) {
        const DecouplingSolution sol = compute_huv(node, Matrix(), opts);
        const Matrix Ai = (Matrix::Identity(n, n) - sol.U * node.C) * model.A;
        out.per_node.push_back(undetectable_subspace(node.C, Ai, opts));
    }
    out.witness = subspace_intersection(out.per_node, n, opts);
    out.ok = out.witness.trivial();
    return out;
}

namespace {

Matrix node_Y(const DesignOptions& opts, size_t i, int n, int p) {
    if (i < opts.Y_per_node.size() && opts.Y_per_node[i].size() != 0)
        return opts.Y_per_node[i];
    if (opts.Y_override.size() != 0) return opts.Y_override;
    return Matrix::Zero(n, p);
}

struct NodeSynthesis {
    DecouplingSolution dec;
    Matrix A_bar;
    DetectabilityDecomposition dd;
    Matrix K_d;
    Matrix Gamma_d;
};

}  // namespace

DesignResult design_gains(const SystemModel& model, TopologyMode mode,
                          double graph_quantity, const DesignOptions& opts) {
    validate_model(model, opts.numeric);
    const int n = model.state_dim();
    const int N = model.node_count();
    if (graph_quantity <= 0.0)
        throw NumericError("invalid_argument", "graph quantity must be positive");

    for (int i = 0; i < N; ++i) {
        if (!check_rank_condition(model.nodes[i], opts.numeric))
            throw NumericError("unsolvable_decoupling",
                               "rank condition fails at node " + std::to_string(i + 1));
    }
    const auto joint = check_extensive_joint_detectability(model, opts.numeric);
    if (!joint.ok)
        throw NumericError("not_jointly_detectable",
                           "shared undetectable subspace of dimension " +
                               std::to_string(joint.witness.dim()));

    std::vector<NodeSynthesis> syn(N);
    for (int i = 0; i < N; ++i) {
        const NodeIO& node = model.nodes[i];
        const Matrix Y = node_Y(opts, static_cast<size_t>(i), n,
                                static_cast<int>(node.C.rows()));
        syn[i].dec = compute_huv(node, Y, opts.numeric);
        syn[i].A_bar = (Matrix::Identity(n, n) - syn[i].dec.H * node.C) * model.A;
        syn[i].dd = detectability_decomposition(node.C, syn[i].A_bar, opts.numeric);
        syn[i].K_d = stabilizing_output_injection(syn[i].dd.C_d, syn[i].dd.A_dd,
                                                  opts.injection, opts.numeric);
        syn[i].Gamma_d = syn[i].dd.A_dd - syn[i].K_d * syn[i].dd.C_d;
    }

    ObserverDesign design;
    design.mode = mode;
    DesignCertificate cert;
    double beta = opts.beta0;
    const double beta_cap = opts.beta0 * std::ldexp(1.0, opts.beta_max_doublings);
    int extra_left = -1;  // -1 until the LMI first holds
    for (;;) {
        design.nodes.assign(static_cast<size_t>(N), NodeGains{});
        cert.Lambda.assign(static_cast<size_t>(N), Matrix());
        for (int i = 0; i < N; ++i) {
            const NodeIO& node = model.nodes[i];
            const auto& s = syn[i];
            const int v = s.dd.v;
            const int nd = n - v;
            const Matrix P_d =
                solve_lyapunov(s.Gamma_d, beta * Matrix::Identity(nd, nd), opts.numeric);
            Matrix T(n, n);
            T << s.dd.T_d, s.dd.T_u;
            Matrix P_blocks = Matrix::Zero(n, n);
            P_blocks.topLeftCorner(nd, nd) = P_d;
            P_blocks.bottomRightCorner(v, v) =
                opts.piu_scale * Matrix::Identity(v, v);
            NodeGains g;
            g.U = s.dec.U;
            g.V = s.dec.V;
            g.Y = node_Y(opts, static_cast<size_t>(i), n,
                         static_cast<int>(node.C.rows()));
            g.H = s.dec.H;
            g.M = Matrix::Identity(n, n) - g.H * node.C;
            g.P = symmetrized(T * P_blocks * T.transpose());
            Matrix K_full(n, node.C.rows());
            K_full << s.K_d, Matrix::Zero(v, node.C.rows());
            g.K = T * K_full;
            g.N = s.A_bar - g.K * node.C;
            g.L = g.K + g.N * g.H;
            cert.Lambda[static_cast<size_t>(i)] =
                symmetrized(g.N.transpose() * g.P + g.P * g.N);
            design.nodes[static_cast<size_t>(i)] = std::move(g);
        }
        const bool nd_ok = is_negative_definite(cert.lambda_sum(), 0.0);
        if (extra_left < 0 && nd_ok) extra_left = opts.beta_extra_doublings;
        if (extra_left == 0) break;
        if (extra_left > 0) --extra_left;
        beta *= 2.0;
        if (beta > beta_cap)
            throw NumericError("lmi_scaling_failed",
                               "beta exceeded its cap without a feasible certificate");
    }
    cert.beta = beta;
    cert.lmi_ok = true;
    cert.chi_bound = compute_chi(cert, graph_quantity, 1.0);
    design.chi = cert.chi_bound * opts.chi_safety;
    return {std::move(design), std::move(cert)};
}

std::vector<Matrix> compute_lambda(const ObserverDesign& design,
                                   const SystemModel& model) {
    const int n = model.state_dim();
    std::vector<Matrix> out;
    out.reserve(design.nodes.size());
    const Matrix I = Matrix::Identity(n, n);
    for (size_t i = 0; i < design.nodes.size(); ++i) {
        const NodeGains& g = design.nodes[i];
        const Matrix& C = model.nodes[i].C;
        const Matrix Ybar = g.P * g.Y;
        const Matrix Kbar = g.P * g.K;
        Matrix lam = model.A.transpose() * (I - C.transpose() * g.U.transpose()) * g.P +
                     g.P * (I - g.U * C) * model.A -
                     model.A.transpose() * C.transpose() * g.V.transpose() * Ybar.transpose() -
                     Ybar * g.V * C * model.A -
                     C.transpose() * Kbar.transpose() - Kbar * C;
        out.push_back(symmetrized(lam));
    }
    return out;
}

double compute_chi(const DesignCertificate& cert, double graph_quantity,
                   double safety) {
    if (!cert.lmi_ok && cert.Lambda.empty())
        throw NumericError("no_certificate", "compute_chi requires a populated certificate");
    const Matrix sum = cert.lambda_sum();
    if (!is_negative_definite(sum, 0.0))
        throw NumericError("no_certificate", "sum of Lambda_i is not negative definite");
    if (graph_quantity <= 0.0)
        throw NumericError("invalid_argument", "graph quantity must be positive");
    const Matrix lam = cert.lambda_block_diag();
    const Matrix lam_p = cert.lambda_stack();
    const Matrix inner =
        lam - lam_p.transpose() * sum.ldlt().solve(lam_p);
    return safety * spectral_norm(symmetrized(inner)) / (2.0 * graph_quantity);
}

double compute_decay_rate(const ObserverDesign& design,
                          const DesignCertificate& cert, double chi,
                          const Matrix& L) {
    const int n = static_cast<int>(design.nodes.front().P.rows());
    const Matrix M =
        2.0 * chi * kron(L, Matrix::Identity(n, n)) - cert.lambda_block_diag();
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(M));
    const double lam_min = es.eigenvalues().minCoeff();
    if (lam_min <= 0.0)
        throw NumericError("chi_too_small",
                           "2 chi (L (x) I) - Lambda is not positive definite");
    double pmax = 0.0;
    for (const NodeGains& g : design.nodes) {
        Eigen::SelfAdjointEigenSolver<Matrix> ep(symmetrized(g.P));
        pmax = std::max(pmax, ep.eigenvalues().maxCoeff());
    }
    return lam_min / pmax;
}

bool verify_lmi(const DesignCertificate& cert, double tol) {
    return is_negative_definite(cert.lambda_sum(), tol);
}

Matrix recover_K(const Matrix& N, const Matrix& H, const Matrix& A,
                 const Matrix& C, const NumericOptions& opts) {
    const int n = static_cast<int>(A.rows());
    const Matrix rhs = (Matrix::Identity(n, n) - H * C) * A - N;  // = K C
    return rhs * pseudo_inverse(C, opts);
}

VerificationReport verify_existing_design(const SystemModel& model,
                                          const ObserverDesign& design,
                                          double tol,
                                          const NumericOptions& opts) {
    const int n = model.state_dim();
    if (design.nodes.size() != model.nodes.size())
        throw NumericError("dimension_mismatch", "design/model node count");
    VerificationReport rep;
    rep.tol = tol;
    rep.pass = true;
    const Matrix I = Matrix::Identity(n, n);
    std::vector<Matrix> lambdas;

    auto rel = [](const Matrix& resid, const Matrix& ref) {
        return resid.norm() / std::max(ref.norm(), 1.0);
    };
    auto flag = [&](bool bad, const std::string& what) {
        if (bad && rep.pass) {
            rep.pass = false;
            rep.failure = what;
        }
    };

    for (size_t i = 0; i < design.nodes.size(); ++i) {
        const NodeGains& g = design.nodes[i];
        const NodeIO& node = model.nodes[i];
        NodeVerification nv;
        const Matrix M_expect = I - g.H * node.C;
        Matrix K = g.K;
        if (K.size() == 0) K = recover_K(g.N, g.H, model.A, node.C, opts);
        rep.recovered_K.push_back(K);

        nv.decoupling = node.B_bar.cols()
                            ? (M_expect * node.B_bar).norm() /
                                  std::max(node.B_bar.norm(), 1.0)
                            : 0.0;
        nv.m_residual = rel(g.M - M_expect, M_expect);
        const Matrix N_expect = M_expect * model.A - K * node.C;
        nv.n_residual = rel(g.N - N_expect, N_expect);
        const Matrix L_expect = K + g.N * g.H;
        nv.l_residual = rel(g.L - L_expect, L_expect);
        Eigen::SelfAdjointEigenSolver<Matrix> ep(symmetrized(g.P));
        nv.p_definiteness = ep.eigenvalues().minCoeff();
        nv.n_abscissa = spectral_abscissa(g.N);
        lambdas.push_back(symmetrized(g.N.transpose() * g.P + g.P * g.N));

        const std::string tag = " at node " + std::to_string(i + 1);
        flag(nv.decoupling > tol, "decoupling residual" + tag);
        flag(nv.m_residual > tol, "M residual" + tag);
        flag(nv.n_residual > tol, "N residual" + tag);
        flag(nv.l_residual > tol, "L residual" + tag);
        flag(nv.p_definiteness <= 0.0, "P not positive definite" + tag);
        rep.nodes.push_back(nv);
    }
    Matrix sum = lambdas.front();
    for (size_t i = 1; i < lambdas.size(); ++i) sum += lambdas[i];
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(sum));
    rep.lmi_max_eig = es.eigenvalues().maxCoeff();
    rep.lmi_ok = rep.lmi_max_eig < 0.0;
    flag(!rep.lmi_ok, "sum of Lambda_i not negative definite");
    return rep;
}

}  // namespace duio
