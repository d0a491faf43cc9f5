#include "duio/refcase.hpp"

namespace duio::refcase {

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows.begin()->size());
    Matrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace

SystemModel model() {
    const Matrix A = mat({{13, 1, 17, 5, -16, 2},
                          {2, 6, 3, -1, 8, 4},
                          {0, 1, -8, -7, -16, 5},
                          {-2, -13, -15, -15, 5, 7},
                          {-7, 43, 15, 3, -11, 8},
                          {6, -7, 1, 2, 1, -9}});
    Matrix B = Matrix::Zero(6, 3);
    B(0, 0) = 1;
    B(1, 1) = 1;
    B(2, 2) = 1;
    Matrix D = Matrix::Zero(6, 1);
    D(5, 0) = 1;
    const std::vector<Matrix> C = {
        mat({{0, 1, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0}, {1, 0, 0, 0, 0, 1}}),
        mat({{0, 1, 1, 0, 0, 0}, {1, 0, 1, 0, 0, 0}, {0, 0, 1, 0, 0, 1}}),
        mat({{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}, {1, 0, 1, 0, 0, 1}}),
        mat({{1, 0, 0, 1, 0, 1},
             {0, 1, 0, 0, 0, 0},
             {0, 0, 1, 0, 0, 0},
             {0, 1, 0, 0, 0, 1}})};
    const std::vector<std::vector<int>> known = {{0}, {1}, {2}, {}};
    return make_model(A, B, D, C, known);
}

Matrix feedback_gain() {
    return mat({{7.445, 15.70, 24.16, 11.19, -19.81, 8.128},
                {5.254, 4.307, 8.581, 6.864, 7.416, -2.586},
                {-4.382, -23.23, -33.65, -30.91, -6.951, 18.01}});
}

namespace {

std::vector<Matrix> published_H() {
    return {mat({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 1}}),
            mat({{-1, 1, 0}, {0, 0, 0}, {1, 0, 0}, {0, 0, 0}, {0, 0, 0}, {-1, 0, 1}}),
            mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {-1, 0, 1}}),
            mat({{1, 1, 0, -1},
                 {0, 1, 0, 0},
                 {0, 0, 1, 0},
                 {0, 0, 0, 0},
                 {0, 0, 0, 0},
                 {0, -1, 0, 1}})};
}

std::vector<Matrix> published_M() {
    return {mat({{1, 0, 0, 0, 0, 0},
                 {0, 0, 0, 0, 0, 0},
                 {0, 0, 0, 0, 0, 0},
                 {0, 0, 0, 1, 0, 0},
                 {0, 0, 0, 0, 1, 0},
                 {-1, 0, 0, 0, 0, 0}}),
            mat({{0, 1, 0, 0, 0, 0},
                 {0, 1, 0, 0, 0, 0},
                 {0, -1, 0, 0, 0, 0},
                 {0, 0, 0, 1, 0, 0},
                 {0, 0, 0, 0, 1, 0},
                 {0, 1, 0, 0, 0, 0}}),
            mat({{0, 0, 0, 0, 0, 0},
                 {0, 0, 0, 0, 0, 0},
                 {0, 0, 1, 0, 0, 0},
                 {0, 0, 0, 1, 0, 0},
                 {0, 0, 0, 0, 1, 0},
                 {0, 0, -1, 0, 0, 0}}),
            mat({{0, 0, 0, -1, 0, 0},
                 {0, 0, 0, 0, 0, 0},
                 {0, 0, 0, 0, 0, 0},
                 {0, 0, 0, 1, 0, 0},
                 {0, 0, 0, 0, 1, 0},
                 {0, 0, 0, 0, 0, 0}})};
}

std::vector<Matrix> published_N() {
    return {mat({{-205.0, -3.400, 8.750, 5.000, -16.00, -216.0},
                 {0, -214.3, 0.4000, 0, 0, 0},
                 {0, 0.4000, -313.0, 0, 0, 0},
                 {546.0, 4.667, 7.000, -15.00, 5.000, 555.0},
                 {12.40, -2.000, 7.800, 3.000, -11.00, 27.40},
                 {-647.0, -3.667, -15.33, -5.000, 16.00, -636.0}}),
            mat({{2.000, 6.000, -5.250, -1.000, 8.000, -4.250},
                 {2.000, 6.000, 3.000, -1.000, 8.000, 4.000},
                 {-2.000, -6.000, -3.000, 1.000, -8.000, -4.000},
                 {20.00, -13.00, 7.000, -15.00, 5.000, 7.000},
                 {-14.20, 43.00, 0.6005, 3.000, -11.00, 0.8004},
                 {3.667, 6.000, 4.667, -1.000, 8.000, 4.000}}),
            mat({{-218.0, -4.400, 0, 0, 0, 0},
                 {-4.400, -214.3, 0, 0, 0, 0},
                 {-8.250, 1.400, -8.000, -7.000, -16.00, 5.000},
                 {212.0, 4.667, -15.00, -15.00, 5.000, 7.000},
                 {53.80, -2.000, 7.799, 3.000, -11.00, 0.8002},
                 {1093, -3.667, 8.000, 7.000, 16.00, -5.000}}),
            mat({{-216.0, 4.200, 6.750, -203.0, -5.000, -229.4},
                 {0, -214.3, 0.4000, 0, 0, 0},
                 {0, 0.4000, -313.0, 0, 0, 0},
                 {-579.0, 4.667, 7.000, -592.0, 5.000, -570.0},
                 {-39.00, -47.00, 7.801, -29.00, -11.00, -69.00},
                 {0, -2.667, 1.667, 0, 0, 0}})};
}

std::vector<Matrix> published_L() {
    return {mat({{1, 17, 2},
                 {0, 0, 0},
                 {0, 0, 0},
                 {-13, -15, 7},
                 {43, 15, 8},
                 {-1, -17, -2}}),
            mat({{-3, 2, 4},
                 {-3, 2, 4},
                 {3, -2, -4},
                 {-20, -2, 7},
                 {14, -7, 8},
                 {-3, 2, 4}}),
            mat({{3.095e-3, 0, 8.646e-4},
                 {6.644e-4, 0, 8.238e-4},
                 {-5.001, 1.000, 4.999},
                 {-9.002, -13.00, 7.000},
                 {-15.00, 43.00, 7.999},
                 {4.987, -1.000, -5.004}}),
            mat({{2.001, 22.00, 15.00, -8.999},
                 {0, 7.377e-4, 0, 7.435e-4},
                 {0, 0, 0, -2.423e-4},
                 {-1.996, -22.00, -15.00, 9.001},
                 {-6.999, 28.00, 15.00, 15.00},
                 {0, 0, 0, 0}})};
}

}  // namespace

ObserverDesign published_design(TopologyMode mode) {
    const SystemModel sys = model();
    ObserverDesign design;
    design.mode = mode;
    design.chi = reported().chi_undirected;
    const auto H = published_H();
    const auto M = published_M();
    const auto N = published_N();
    const auto L = published_L();
    for (int i = 0; i < 4; ++i) {
        NodeGains g;
        g.H = H[static_cast<size_t>(i)];
        g.M = M[static_cast<size_t>(i)];
        g.N = N[static_cast<size_t>(i)];
        g.L = L[static_cast<size_t>(i)];
        g.P = 0.1 * Matrix::Identity(6, 6);
        const DecouplingSolution dec = compute_huv(sys.nodes[static_cast<size_t>(i)], Matrix());
        g.U = dec.U;
        g.V = dec.V;
        g.Y = Matrix::Zero(6, sys.nodes[static_cast<size_t>(i)].C.rows());
        design.nodes.push_back(std::move(g));
    }
    return design;
}

ObserverDesign consistent_design(TopologyMode mode) {
    const SystemModel sys = model();
    ObserverDesign design = published_design(mode);
    for (size_t i = 0; i < design.nodes.size(); ++i) {
        NodeGains& g = design.nodes[i];
        const Matrix& C = sys.nodes[i].C;
        g.K = recover_K(g.N, g.H, sys.A, C);
        g.M = Matrix::Identity(6, 6) - g.H * C;
        g.N = g.M * sys.A - g.K * C;
        g.L = g.K + g.N * g.H;
    }
    switch (mode) {
        case TopologyMode::fixed_undirected: design.chi = reported().chi_undirected; break;
        case TopologyMode::directed: design.chi = reported().chi_directed; break;
        case TopologyMode::switching: design.chi = reported().chi_switching; break;
    }
    return design;
}

Topology scenario1_topology() {
    return Topology::undirected_from_edges(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
}

Topology scenario2_topology() {
    // 1<->2, 2->4, 4->1, 4->3, 3->1 (receiver convention a(to, from) = 1)
    return Topology::directed_from_edges(
        4, {{0, 1}, {1, 0}, {1, 3}, {3, 0}, {3, 2}, {2, 0}});
}

SwitchingSchedule scenario3_schedule() {
    SwitchingSchedule s;
    s.topologies = {
        Topology::undirected_from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 3}}),
        Topology::undirected_from_edges(4, {{0, 1}, {1, 3}, {2, 3}}),
        Topology::undirected_from_edges(4, {{0, 1}, {1, 3}, {2, 1}}),
        Topology::undirected_from_edges(4, {{0, 1}, {0, 2}, {3, 2}})};
    s.dwell_time = 0.1;
    s.start_index = 0;
    s.validate();
    return s;
}

Vector initial_state() {
    Vector x0(6);
    x0 << 2, -1, 1, -2, 1.5, 0.5;
    return x0;
}

ScenarioConfig scenario_config(int which) {
    ScenarioConfig cfg;
    cfg.model = model();
    cfg.feedback_F = feedback_gain();
    cfg.noise = {NoiseSpec::Kind::band_limited_white, 1.0, 1e-3};
    cfg.horizon = 1.0;
    cfg.initial_plant_state = initial_state();
    cfg.seed = 42;
    cfg.verify_tol = 1e-8;
    switch (which) {
        case 1:
            cfg.design = consistent_design(TopologyMode::fixed_undirected);
            cfg.topology = scenario1_topology();
            cfg.step = 1e-4;
            break;
        case 2:
            cfg.design = consistent_design(TopologyMode::directed);
            cfg.topology = scenario2_topology();
            cfg.step = 5e-5;
            break;
        case 3:
            cfg.design = consistent_design(TopologyMode::switching);
            cfg.topology = scenario3_schedule();
            cfg.step = 5e-6;
            break;
        default:
            throw NumericError("invalid_argument", "scenario index must be 1, 2 or 3");
    }
    return cfg;
}

}  // namespace duio::refcase
