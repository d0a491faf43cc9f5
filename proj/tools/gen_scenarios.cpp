// Regenerates the bundled scenario files under scenarios/ from the embedded
// benchmark data. Run from the repository root after changing the benchmark.

#include <iostream>

#include "duio/refcase.hpp"
#include "duio/scenario.hpp"

using namespace duio;

namespace {

Scenario base_scenario(int which) {
    Scenario sc;
    sc.model = refcase::model();
    sc.run.horizon = 1.0;
    sc.run.seed = 42;
    sc.run.noise = {NoiseSpec::Kind::band_limited_white, 1.0, 1e-3};
    sc.run.initial_state = refcase::initial_state();
    sc.run.feedback_F = refcase::feedback_gain();
    switch (which) {
        case 1:
            sc.graph = refcase::scenario1_topology();
            sc.design = refcase::consistent_design(TopologyMode::fixed_undirected);
            sc.run.step = 1e-4;
            break;
        case 2:
            sc.graph = refcase::scenario2_topology();
            sc.design = refcase::consistent_design(TopologyMode::directed);
            sc.run.step = 5e-5;
            break;
        case 3:
            sc.graph = refcase::scenario3_schedule();
            sc.design = refcase::consistent_design(TopologyMode::switching);
            sc.run.step = 5e-6;
            break;
    }
    return sc;
}

// A model whose single unstable mode is invisible to every node: the
// existence check must fail with a one-dimensional witness.
Scenario undetectable_scenario() {
    Scenario sc;
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = -1;
    A(1, 1) = -2;
    A(2, 2) = 1;  // unstable, unobserved below
    Matrix B = Matrix::Zero(3, 1);
    B(0, 0) = 1;
    Matrix D = Matrix::Zero(3, 0);
    Matrix C1(1, 3), C2(1, 3);
    C1 << 1, 0, 0;
    C2 << 0, 1, 0;
    sc.model = make_model(A, B, D, {C1, C2}, {{0}, {0}});
    sc.graph = Topology::undirected_from_edges(2, {{0, 1}});
    sc.run.step = 1e-3;
    sc.run.horizon = 0.1;
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    std::string dir = argc > 1 ? argv[1] : "scenarios";
    for (int which = 1; which <= 3; ++which) {
        const std::string path = dir + "/scenario" + std::to_string(which) + ".json";
        save_scenario(path, base_scenario(which));
        std::cout << "wrote " << path << "\n";
    }
    const std::string path = dir + "/undetectable_pair.json";
    save_scenario(path, undetectable_scenario());
    std::cout << "wrote " << path << "\n";
    return 0;
}
