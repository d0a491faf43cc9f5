#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "duio/linalg.hpp"
#include "duio/refcase.hpp"
#include "oracles.hpp"

using namespace duio;
using oracles::random_matrix;

namespace {

Matrix two_by_two(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("pseudo_inverse basics and Penrose identities") {
    CHECK((pseudo_inverse(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() ==
          doctest::Approx(0.0));

    Matrix M(2, 3);
    M << 1, 0, 0, 0, 1, 0;  // orthonormal rows: pinv is the transpose
    CHECK((pseudo_inverse(M) - M.transpose()).norm() < 1e-14);

    // C_1 B_bar_1 of the benchmark multiplies out to the identity.
    const SystemModel sys = refcase::model();
    const Matrix CB = sys.nodes[0].C * sys.nodes[0].B_bar;
    CHECK((CB - Matrix::Identity(3, 3)).norm() == doctest::Approx(0.0));
    CHECK((pseudo_inverse(CB) - Matrix::Identity(3, 3)).norm() < 1e-14);

    Matrix Z = Matrix::Zero(4, 2);
    CHECK(pseudo_inverse(Z).rows() == 2);
    CHECK(pseudo_inverse(Z).norm() == 0.0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const int r = 1 + static_cast<int>(rng() % 20);
        const int c = 1 + static_cast<int>(rng() % 20);
        const Matrix A = random_matrix(rng, r, c);
        const Matrix Ap = pseudo_inverse(A);
        CHECK((A * Ap * A - A).norm() <= 1e-10 * A.norm());
        CHECK((Ap * A * Ap - Ap).norm() <= 1e-10 * Ap.norm());
    }
}

TEST_CASE("unobservable_subspace against the fixpoint oracle") {
    std::mt19937_64 rng(12);

    SUBCASE("full-state measurement is observable") {
        const Matrix A = random_matrix(rng, 4, 4);
        CHECK(unobservable_subspace(Matrix::Identity(4, 4), A).dim() == 0);
    }

    SUBCASE("decoupled unmeasured mode") {
        Matrix A = two_by_two(1, 0, 0, 2);
        Matrix C(1, 2);
        C << 1, 0;
        const SubspaceBasis uo = unobservable_subspace(C, A);
        REQUIRE(uo.dim() == 1);
        CHECK(std::abs(std::abs(uo.basis(1, 0)) - 1.0) < 1e-12);
    }

    SUBCASE("benchmark node 1 matches the definition-based stack") {
        const SystemModel sys = refcase::model();
        const auto sol = compute_huv(sys.nodes[0], Matrix());
        const Matrix A1 =
            (Matrix::Identity(6, 6) - sol.U * sys.nodes[0].C) * sys.A;
        const SubspaceBasis uo = unobservable_subspace(sys.nodes[0].C, A1);
        const Matrix oracle = oracles::unobservable_fixpoint(sys.nodes[0].C, A1);
        CHECK(uo.dim() == oracle.cols());
        CHECK(subspace_distance(uo, {6, oracle}) < 1e-8);
    }

    SUBCASE("random systems, n <= 8") {
        for (int trial = 0; trial < 30; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 7);
            const int p = 1 + static_cast<int>(rng() % 2);
            Matrix A = random_matrix(rng, n, n);
            Matrix C = random_matrix(rng, p, n);
            if (trial % 3 == 0) C.rightCols(n / 2).setZero();  // force blind states
            const SubspaceBasis uo = unobservable_subspace(C, A);
            const Matrix oracle = oracles::unobservable_fixpoint(C, A);
            CHECK(uo.dim() == oracle.cols());
            if (uo.dim() > 0) CHECK(subspace_distance(uo, {n, oracle}) < 1e-7);
        }
    }
}

TEST_CASE("spectral_split partitions by the closed right half-plane") {
    SUBCASE("all stable") {
        const SpectralSplit s = spectral_split(two_by_two(-1, 0, 0, -2), 1e-9);
        CHECK(s.stable.dim() == 2);
        CHECK(s.unstable.dim() == 0);
    }

    SUBCASE("zero eigenvalue counts as unstable") {
        Matrix A = Matrix::Zero(3, 3);
        A(0, 0) = -1;
        A(2, 2) = 3;
        const SpectralSplit s = spectral_split(A, 1e-9);
        CHECK(s.stable.dim() == 1);
        CHECK(s.unstable.dim() == 2);
        CHECK(std::abs(std::abs(s.stable.basis(0, 0)) - 1.0) < 1e-12);
    }

    SUBCASE("random with known eigenvalues, invariance and projector sum") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            const std::vector<double> re = {-3.0, -1.2, -0.4, 0.7, 0.7, 2.5};
            const std::vector<double> im = {0, 0, 0, 1.3, 0, 0};
            const Matrix A = oracles::matrix_with_eigenvalues(rng, re, im);
            const SpectralSplit s = spectral_split(A, 1e-9);
            CHECK(s.stable.dim() == 3);
            CHECK(s.unstable.dim() == 3);
            // each basis spans an invariant subspace
            for (const SubspaceBasis* b : {&s.stable, &s.unstable}) {
                const Matrix V = b->basis;
                const Matrix resid = A * V - V * (V.transpose() * A * V);
                CHECK(resid.norm() <= 1e-8 * A.norm());
            }
            // spectral (oblique) projectors sum to the identity and commute with A
            Matrix X(6, 6);
            X << s.stable.basis, s.unstable.basis;
            const Matrix Xi = X.inverse();
            const Matrix Ps = X.leftCols(3) * Xi.topRows(3);
            const Matrix Pu = X.rightCols(3) * Xi.bottomRows(3);
            CHECK((Ps + Pu - Matrix::Identity(6, 6)).norm() < 1e-10);
            CHECK((A * Ps - Ps * A).norm() <= 1e-7 * A.norm());
        }
    }
}

TEST_CASE("undetectable_subspace excludes stable unobservable modes") {
    SUBCASE("observable pair") {
        Matrix A = two_by_two(0, 1, -1, 0);
        Matrix C(1, 2);
        C << 1, 0;
        CHECK(undetectable_subspace(C, A).dim() == 0);
    }

    SUBCASE("stable blind mode excluded, unstable kept") {
        Matrix A = two_by_two(-5, 0, 0, 2);
        Matrix C = Matrix::Zero(1, 2);
        const SubspaceBasis ud = undetectable_subspace(C, A);
        REQUIRE(ud.dim() == 1);
        CHECK(std::abs(std::abs(ud.basis(1, 0)) - 1.0) < 1e-10);
    }

    SUBCASE("benchmark nodes have joint trivial intersection") {
        const SystemModel sys = refcase::model();
        std::vector<SubspaceBasis> per_node;
        std::vector<int> dims;
        for (const NodeIO& node : sys.nodes) {
            const auto sol = compute_huv(node, Matrix());
            const Matrix Ai = (Matrix::Identity(6, 6) - sol.U * node.C) * sys.A;
            per_node.push_back(undetectable_subspace(node.C, Ai));
            dims.push_back(per_node.back().dim());
        }
        CHECK(dims == std::vector<int>{1, 1, 0, 0});
        CHECK(subspace_intersection(per_node, 6).dim() == 0);
    }
}

TEST_CASE("subspace_intersection") {
    Matrix e12(3, 2), e23(3, 2);
    e12 << 1, 0, 0, 1, 0, 0;
    e23 << 0, 0, 1, 0, 0, 1;
    const SubspaceBasis inter = subspace_intersection({{3, e12}, {3, e23}}, 3);
    REQUIRE(inter.dim() == 1);
    CHECK(std::abs(std::abs(inter.basis(1, 0)) - 1.0) < 1e-12);

    // full space is the identity element
    std::mt19937_64 rng(14);
    const Matrix V = oracles::random_orthonormal(rng, 4, 2);
    const SubspaceBasis kept =
        subspace_intersection({{4, V}, SubspaceBasis::full(4)}, 4);
    CHECK(kept.dim() == 2);
    CHECK(subspace_distance(kept, {4, V}) < 1e-12);

    CHECK(subspace_intersection({}, 5).dim() == 5);

    SUBCASE("random subspaces against the membership oracle") {
        for (int trial = 0; trial < 20; ++trial) {
            // build subspaces sharing a planted common part
            const int common = static_cast<int>(rng() % 3);
            const Matrix shared = oracles::random_orthonormal(rng, 6, common);
            std::vector<SubspaceBasis> inputs;
            for (int k = 0; k < 2; ++k) {
                Matrix raw(6, common + 2);
                raw << shared, random_matrix(rng, 6, 2);
                Eigen::JacobiSVD<Matrix> svd(raw, Eigen::ComputeThinU);
                inputs.push_back({6, svd.matrixU().leftCols(common + 2)});
            }
            const SubspaceBasis inter = subspace_intersection(inputs, 6);
            CHECK(inter.dim() >= common);
            for (int c = 0; c < inter.dim(); ++c)
                for (const auto& in : inputs)
                    CHECK(oracles::membership_residual(in.basis, inter.basis.col(c)) < 1e-8);
        }
    }
}

TEST_CASE("detectability_decomposition block structure") {
    SUBCASE("detectable pair keeps the full block") {
        Matrix A = two_by_two(0.5, 1, 0, -2);
        Matrix C(1, 2);
        C << 1, 0;
        const auto dd = detectability_decomposition(C, A);
        CHECK(dd.v == 0);
        CHECK((dd.T_d * dd.T_d.transpose() - Matrix::Identity(2, 2)).norm() < 1e-12);
        // A_dd similar to A: same eigenvalues
        Eigen::VectorXcd ev_a = A.eigenvalues();
        Eigen::VectorXcd ev_d = dd.A_dd.eigenvalues();
        std::sort(ev_a.data(), ev_a.data() + 2,
                  [](auto a, auto b) { return a.real() < b.real(); });
        std::sort(ev_d.data(), ev_d.data() + 2,
                  [](auto a, auto b) { return a.real() < b.real(); });
        CHECK((ev_a - ev_d).norm() < 1e-10);
    }

    SUBCASE("undetectable second state") {
        Matrix A = two_by_two(-1, 0, 0, 4);
        Matrix C(1, 2);
        C << 1, 0;
        const auto dd = detectability_decomposition(C, A);
        CHECK(dd.v == 1);
        CHECK(std::abs(std::abs(dd.T_u(1, 0)) - 1.0) < 1e-12);
    }

    SUBCASE("benchmark nodes satisfy the structural zeros") {
        const SystemModel sys = refcase::model();
        for (int i : {0, 3}) {  // node 1 has v = 1, node 4 has v = 0
            const auto sol = compute_huv(sys.nodes[static_cast<size_t>(i)], Matrix());
            const Matrix A_bar =
                (Matrix::Identity(6, 6) - sol.H * sys.nodes[static_cast<size_t>(i)].C) * sys.A;
            const auto dd =
                detectability_decomposition(sys.nodes[static_cast<size_t>(i)].C, A_bar);
            Matrix T(6, 6);
            T << dd.T_d, dd.T_u;
            CHECK((T * T.transpose() - Matrix::Identity(6, 6)).norm() < 1e-10);
            const Matrix blocks = T.transpose() * A_bar * T;
            CHECK(blocks.topRightCorner(6 - dd.v, dd.v).norm() <= 1e-8 * A_bar.norm());
            CHECK((sys.nodes[static_cast<size_t>(i)].C * dd.T_u).norm() <=
                  1e-8 * sys.nodes[static_cast<size_t>(i)].C.norm());
        }
    }
}

TEST_CASE("solve_lyapunov") {
    SUBCASE("scalar case replicated") {
        const Matrix P = solve_lyapunov(-Matrix::Identity(4, 4), Matrix::Identity(4, 4));
        CHECK((P - 0.5 * Matrix::Identity(4, 4)).norm() < 1e-12);
    }

    SUBCASE("hand-solved 2x2 system") {
        const Matrix G = two_by_two(-1, 1, 0, -2);
        const Matrix P = solve_lyapunov(G, Matrix::Identity(2, 2));
        CHECK((P - oracles::hand_lyapunov_2x2()).norm() < 1e-12);
    }

    SUBCASE("unstable G is rejected") {
        try {
            solve_lyapunov(two_by_two(3, 0, 0, -1), Matrix::Identity(2, 2));
            FAIL("expected a throw");
        } catch (const NumericError& e) {
            CHECK(e.code() == "lyapunov_unstable");
        }
    }

    SUBCASE("random Hurwitz: residual, symmetry, definiteness") {
        std::mt19937_64 rng(15);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 6);
            const Matrix G = oracles::random_hurwitz(rng, n, 0.3);
            Matrix Q = random_matrix(rng, n, n);
            Q = Q * Q.transpose() + Matrix::Identity(n, n);
            const Matrix P = solve_lyapunov(G, Q);
            CHECK((G.transpose() * P + P * G + Q).norm() <=
                  1e-7 * (Q.norm() + G.norm() * P.norm()));
            CHECK((P - P.transpose()).norm() <= 1e-12 * P.norm());
            Eigen::SelfAdjointEigenSolver<Matrix> es(P);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("stabilizing_output_injection") {
    SUBCASE("already deep enough returns zero") {
        const Matrix K =
            stabilizing_output_injection(Matrix::Identity(2, 2), -Matrix::Identity(2, 2));
        CHECK(K.norm() == 0.0);
    }

    SUBCASE("scalar pole shift meets the margin") {
        Matrix A(1, 1), C(1, 1);
        A << 1;
        C << 1;
        const Matrix K = stabilizing_output_injection(C, A, {0.5, 100.0});
        CHECK((A - K * C)(0, 0) <= -0.5);
    }

    SUBCASE("undetectable pair is rejected via PBH") {
        Matrix A = two_by_two(2, 0, 0, -1);
        Matrix C(1, 2);
        C << 0, 1;  // unstable first state invisible
        try {
            stabilizing_output_injection(C, A);
            FAIL("expected a throw");
        } catch (const NumericError& e) {
            CHECK(e.code() == "not_detectable");
        }
    }

    SUBCASE("random observable pairs meet the margin") {
        std::mt19937_64 rng(16);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 5);
            const Matrix A = random_matrix(rng, n, n, 2.0);
            const Matrix C = random_matrix(rng, 2, n);
            if (unobservable_subspace(C, A).dim() != 0) continue;
            const OutputInjectionOptions inj{0.5, 100.0};
            const Matrix K = stabilizing_output_injection(C, A, inj);
            CHECK(spectral_abscissa(A - K * C) <= -inj.margin * 0.99);
        }
    }

    SUBCASE("detectable pairs with stable blind modes still stabilize") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 20; ++trial) {
            // blind block is stable by construction
            Matrix A = Matrix::Zero(4, 4);
            A.topLeftCorner(2, 2) = random_matrix(rng, 2, 2, 2.0);
            A.bottomRightCorner(2, 2) = oracles::random_hurwitz(rng, 2, 0.5);
            Matrix C = Matrix::Zero(1, 4);
            C.leftCols(2) = random_matrix(rng, 1, 2);
            if (unobservable_subspace(C, A).dim() != 2) continue;
            const Matrix K = stabilizing_output_injection(C, A);
            CHECK(is_hurwitz(A - K * C, 0.0));
        }
    }
}

TEST_CASE("is_hurwitz and is_negative_definite") {
    CHECK(is_hurwitz(-Matrix::Identity(4, 4), 0.0));
    CHECK_FALSE(is_hurwitz(Matrix::Zero(3, 3), 0.0));

    // published N_1 versus an explicit eigenvalue check
    const ObserverDesign pub = refcase::published_design();
    const Matrix& N1 = pub.nodes[0].N;
    Eigen::EigenSolver<Matrix> es(N1);
    const bool oracle = es.eigenvalues().real().maxCoeff() < 0.0;
    CHECK(is_hurwitz(N1, 0.0) == oracle);

    CHECK(is_negative_definite(-Matrix::Identity(6, 6), 0.0));
    Matrix semi = Matrix::Zero(2, 2);
    semi(0, 0) = -1.0;
    CHECK_FALSE(is_negative_definite(semi, 0.0));

    Matrix sum = Matrix::Zero(6, 6);
    for (const NodeGains& g : pub.nodes)
        sum += g.N.transpose() * g.P + g.P * g.N;
    CHECK(is_negative_definite(sum, 0.0));
}

TEST_CASE("undetectable subspace is invariant under the free parameter Y") {
    // 50 randomized instances satisfying the decoupling rank condition
    std::mt19937_64 rng(18);
    for (int done = 0; done < 50; ++done) {
        const int n = 3 + static_cast<int>(rng() % 4);
        const int p = 2 + static_cast<int>(rng() % 2);
        const int d = 1 + static_cast<int>(rng() % 2);
        const auto node = oracles::random_solvable_node(rng, n, p, d);
        const Matrix A = random_matrix(rng, n, n, 2.0);
        duio::NodeIO io = oracles::as_node_io(node);
        const auto sol0 = compute_huv(io, Matrix());
        const Matrix Ai = (Matrix::Identity(n, n) - sol0.U * node.C) * A;
        const Matrix Y = random_matrix(rng, n, p);
        const Matrix A_bar = Ai - Y * sol0.V * node.C * A;
        const SubspaceBasis ud_plain = undetectable_subspace(node.C, Ai);
        const SubspaceBasis ud_shift = undetectable_subspace(node.C, A_bar);
        CHECK(ud_plain.dim() == ud_shift.dim());
        if (ud_plain.dim() > 0)
            CHECK(subspace_distance(ud_plain, ud_shift) <= 1e-8);
    }
}
