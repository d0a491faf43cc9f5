#pragma once

// Bundled 6-state, 4-node benchmark: plant, per-node output maps and input
// partitions, the published observer gains (4-significant-digit rounding),
// the three communication topologies and the reference quantities used by
// the `reproduce` command and the regression suite.

#include "duio/design.hpp"
#include "duio/graph.hpp"
#include "duio/model.hpp"
#include "duio/simulate.hpp"

namespace duio::refcase {

SystemModel model();

// State-feedback gain used by the benchmark runs (u = -F x).
Matrix feedback_gain();

// Gains as published: H_i, M_i, N_i, L_i and P_i = 0.1 I. K_i is left empty
// (recovered by least squares during verification).
ObserverDesign published_design(TopologyMode mode = TopologyMode::fixed_undirected);

// Internally consistent reconstruction: H_i as published, K_i recovered,
// M/N/L rebuilt exactly from the defining equations. Satisfies the structure
// conditions to machine precision, so simulations are exactly decoupled.
ObserverDesign consistent_design(TopologyMode mode = TopologyMode::fixed_undirected);

Topology scenario1_topology();   // undirected 4-cycle, lambda_2 = 2
Topology scenario2_topology();   // strongly connected digraph
SwitchingSchedule scenario3_schedule();  // four undirected graphs, dwell 0.1 s

// Reference values the benchmark reproduces.
struct Reported {
    double chi_undirected = 84.81;
    double chi_directed = 234.0;
    double chi_switching = 4.024e3;
    double time_constant = 4.844e-2;  // 1/mu for the undirected scenario
    double lambda2 = 2.0;
    double connectivity_floor_4 = 4.167e-2;
    Eigen::Vector4d perron_R{0.5714, 1.714, 0.5714, 1.143};
};

inline Reported reported() { return {}; }

// Default initial plant state for the bundled scenarios (the source material
// leaves initial conditions unspecified; estimates start at z_i(0) = 0).
Vector initial_state();

// Fully-populated simulation configs for the three bundled scenarios, using
// the consistent design and the reported chi values.
ScenarioConfig scenario_config(int which);  // 1, 2 or 3

}  // namespace duio::refcase
