#include "duio/graph.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <queue>

namespace duio {

namespace {

// Reachability of every node from `start` along a(i,j) read as j -> i when
// transpose is false (i.e. following who-receives-from links in reverse).
bool reaches_all(const Matrix& adj, int start, bool transpose) {
    const int n = static_cast<int>(adj.rows());
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    int count = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v = 0; v < n; ++v) {
            const double a = transpose ? adj(v, u) : adj(u, v);
            if (a != 0.0 && !seen[v]) {
                seen[v] = 1;
                ++count;
                q.push(v);
            }
        }
    }
    return count == n;
}

}  // namespace

Topology Topology::undirected_from_edges(
    int n, const std::vector<std::pair<int, int>>& edges) {
    Topology t;
    t.node_count = n;
    t.directed = false;
    t.adjacency = Matrix::Zero(n, n);
    for (auto [i, j] : edges) {
        t.adjacency(i, j) = 1.0;
        t.adjacency(j, i) = 1.0;
    }
    t.validate();
    return t;
}

Topology Topology::directed_from_edges(
    int n, const std::vector<std::pair<int, int>>& edges) {
    Topology t;
    t.node_count = n;
    t.directed = true;
    t.adjacency = Matrix::Zero(n, n);
    for (auto [from, to] : edges) t.adjacency(to, from) = 1.0;
    t.validate();
    return t;
}

void Topology::validate() const {
    if (node_count < 1) throw NumericError("invalid_topology", "node_count < 1");
    if (adjacency.rows() != node_count || adjacency.cols() != node_count)
        throw NumericError("invalid_topology", "adjacency dimension mismatch");
    for (int i = 0; i < node_count; ++i) {
        if (adjacency(i, i) != 0.0)
            throw NumericError("invalid_topology", "nonzero diagonal entry");
        for (int j = 0; j < node_count; ++j) {
            const double a = adjacency(i, j);
            if (a != 0.0 && a != 1.0)
                throw NumericError("invalid_topology", "adjacency entries must be 0 or 1");
            if (!directed && adjacency(i, j) != adjacency(j, i))
                throw NumericError("invalid_topology", "undirected adjacency not symmetric");
        }
    }
}

void SwitchingSchedule::validate() const {
    if (dwell_time <= 0.0)
        throw NumericError("invalid_schedule", "dwell_time must be positive");
    if (topologies.empty())
        throw NumericError("invalid_schedule", "no topologies listed");
    if (start_index < 0 || start_index >= static_cast<int>(topologies.size()))
        throw NumericError("invalid_schedule", "start_index out of range");
    for (size_t k = 0; k < topologies.size(); ++k) {
        topologies[k].validate();
        if (topologies[k].directed)
            throw NumericError("invalid_schedule", "switching topologies must be undirected");
        if (!is_connected(topologies[k]))
            throw NumericError("invalid_schedule",
                               "topology " + std::to_string(k) + " is disconnected");
    }
}

int SwitchingSchedule::active_index(double t) const {
    const auto n = static_cast<long long>(topologies.size());
    long long k = static_cast<long long>(std::floor(t / dwell_time + 1e-12));
    if (k < 0) k = 0;
    return static_cast<int>((start_index + k) % n);
}

const Topology& SwitchingSchedule::active(double t) const {
    return topologies[static_cast<size_t>(active_index(t))];
}

Matrix laplacian(const Topology& t) {
    const int n = t.node_count;
    Matrix L = -t.adjacency;
    for (int i = 0; i < n; ++i) L(i, i) = t.adjacency.row(i).sum();
    return L;
}

double algebraic_connectivity(const Matrix& L) {
    if (L.rows() != L.cols())
        throw NumericError("requires_symmetric", "Laplacian must be square");
    if ((L - L.transpose()).norm() > 1e-9 * std::max(1.0, L.norm()))
        throw NumericError("requires_symmetric", "Laplacian must be symmetric");
    if (L.rows() < 2) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(L));
    return es.eigenvalues()(1);
}

bool is_connected(const Topology& t) {
    // Treat edges as bidirectional for plain connectivity.
    Matrix sym = t.adjacency + t.adjacency.transpose();
    Topology u;
    u.node_count = t.node_count;
    u.adjacency = (sym.array() > 0.0).cast<double>();
    return reaches_all(u.adjacency, 0, false);
}

bool is_strongly_connected(const Topology& t) {
    return reaches_all(t.adjacency, 0, false) && reaches_all(t.adjacency, 0, true);
}

PerronWeighting perron_weights(const Topology& t, const NumericOptions& opts) {
    if (!t.directed)
        throw NumericError("requires_strong_connectivity",
                           "perron_weights expects a directed topology");
    if (!is_strongly_connected(t))
        throw NumericError("requires_strong_connectivity",
                           "graph is not strongly connected");
    const int n = t.node_count;
    const Matrix L = laplacian(t);
    // r spans the null space of L'; strong connectivity makes it simple and
    // sign-definite.
    Eigen::JacobiSVD<Matrix> svd(L.transpose(), Eigen::ComputeFullV);
    Vector r = svd.matrixV().col(n - 1);
    if (r.sum() < 0.0) r = -r;
    for (int i = 0; i < n; ++i) {
        if (r(i) <= 0.0)
            throw NumericError("perron_vector_not_positive",
                               "left null vector has a nonpositive component");
    }
    r *= static_cast<double>(n) / r.sum();
    PerronWeighting out;
    out.r = r;
    out.R = r.asDiagonal();
    out.L_hat = out.R * L + L.transpose() * out.R;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(out.L_hat));
    const auto& ev = es.eigenvalues();
    const double scale = std::max(1.0, std::abs(ev(n - 1)));
    if (std::abs(ev(0)) > 1e-9 * scale)
        throw NumericError("laplacian_not_psd", "weighted Laplacian has a negative eigenvalue");
    if (n > 1 && ev(1) <= 1e-9 * scale)
        throw NumericError("zero_eigenvalue_not_simple",
                           "weighted Laplacian zero eigenvalue is repeated");
    (void)opts;
    return out;
}

double connectivity_floor(int n) {
    if (n < 2)
        throw NumericError("invalid_argument", "connectivity_floor requires N >= 2");
    return 2.0 / (static_cast<double>(n) * n * (n - 1));
}

}  // namespace duio
