#pragma once

// Scenario-file loading and saving. A scenario bundles the plant model, the
// communication graph (fixed or switching), an optional externally supplied
// design, run settings and numeric options. Files are JSON with matrices as
// row arrays; doubles round-trip bit-exactly. Node and input indices are
// 1-based in the file to match the usual numbering of the nodes.

#include <optional>
#include <string>
#include <variant>

#include "duio/design.hpp"
#include "duio/graph.hpp"
#include "duio/model.hpp"
#include "duio/simulate.hpp"

namespace duio {

struct RunSettings {
    double horizon = 1.0;
    double step = 1e-4;
    std::uint64_t seed = 0;
    NoiseSpec noise;
    Vector initial_state;                      // empty = zero
    std::vector<Vector> initial_observer_states;  // empty = zero
    Matrix feedback_F;                         // empty = no feedback
    double verify_tol = 1e-8;
};

struct Scenario {
    SystemModel model;
    std::variant<Topology, SwitchingSchedule> graph;
    std::optional<ObserverDesign> design;
    RunSettings run;
    DesignOptions options;
};

// Thrown for file and schema problems; message names the offending field.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& scenario);

// Assembles the simulation config from a scenario with a design block.
ScenarioConfig scenario_config(const Scenario& scenario);

// Effective graph quantity for the coupling bound: lambda_2(L) for fixed
// undirected graphs, C(N) for switching schedules, lambda_2(L_hat)/2 for
// directed graphs (the symmetrized weighted Laplacian enters the directed
// dissipation once, not twice).
double chi_graph_quantity(const Scenario& scenario, TopologyMode mode);
double chi_graph_quantity(const std::variant<Topology, SwitchingSchedule>& graph,
                          TopologyMode mode);

// Mode implied by the graph block (used when no --mode flag is given).
TopologyMode implied_mode(const Scenario& scenario);

}  // namespace duio
