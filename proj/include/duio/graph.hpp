#pragma once

// Communication-topology representation and the spectral quantities entering
// the coupling-gain bounds: Laplacians, algebraic connectivity, switching
// schedules and Perron weighting of strongly connected digraphs.

#include <vector>

#include "duio/types.hpp"

namespace duio {

// Unweighted communication graph. a(i,j) = 1 means node i receives the
// estimate of node j. Undirected topologies keep the adjacency symmetric.
struct Topology {
    int node_count = 0;
    Matrix adjacency;  // N x N, entries in {0,1}, zero diagonal
    bool directed = false;

    static Topology undirected_from_edges(int n,
                                          const std::vector<std::pair<int, int>>& edges);
    // Directed edge (from, to): the receiver `to` gains a(to, from) = 1.
    static Topology directed_from_edges(int n,
                                        const std::vector<std::pair<int, int>>& edges);
    void validate() const;
};

struct SwitchingSchedule {
    std::vector<Topology> topologies;
    double dwell_time = 0.1;  // seconds
    int start_index = 0;

    void validate() const;  // every topology connected, dwell_time > 0
    const Topology& active(double t) const;
    int active_index(double t) const;
};

// Positive left null vector of a strongly connected digraph Laplacian,
// normalized r * 1 = N, with L_hat = R L + L' R.
struct PerronWeighting {
    Vector r;
    Matrix R;
    Matrix L_hat;
};

Matrix laplacian(const Topology& t);

// Second-smallest eigenvalue of a symmetric Laplacian.
double algebraic_connectivity(const Matrix& L);

bool is_connected(const Topology& t);
bool is_strongly_connected(const Topology& t);

PerronWeighting perron_weights(const Topology& t, const NumericOptions& opts = {});

// Connectivity lower bound C(N) = 2 / (N^2 (N-1)) for connected graphs on N
// nodes, used by the switching-topology coupling bound.
double connectivity_floor(int n);

}  // namespace duio
