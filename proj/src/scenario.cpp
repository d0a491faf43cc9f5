#include "duio/scenario.hpp"

#include <fstream>

#include <json.hpp>

namespace duio {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ScenarioError("scenario field '" + field + "': " + why);
}

const json& expect(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing");
    return *it;
}

double expect_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

Matrix read_matrix(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of rows");
    const int rows = static_cast<int>(j.size());
    if (rows == 0) return Matrix(0, 0);
    if (!j[0].is_array()) fail(path + "[1]", "expected a row array");
    const int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            fail(path + "[" + std::to_string(i + 1) + "]", "ragged or non-array row");
        for (int k = 0; k < cols; ++k) {
            const json& v = row[static_cast<size_t>(k)];
            if (!v.is_number())
                fail(path + "[" + std::to_string(i + 1) + "][" + std::to_string(k + 1) + "]",
                     "expected a number");
            m(i, k) = v.get<double>();
        }
    }
    return m;
}

json write_matrix(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Vector read_vector(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    Vector v(static_cast<int>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(path + "[" + std::to_string(i + 1) + "]", "expected a number");
        v(static_cast<int>(i)) = j[i].get<double>();
    }
    return v;
}

json write_vector(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

std::vector<std::pair<int, int>> read_edges(const json& j, int n, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of [i, j] pairs");
    std::vector<std::pair<int, int>> edges;
    for (size_t k = 0; k < j.size(); ++k) {
        const json& e = j[k];
        const std::string ep = path + "[" + std::to_string(k + 1) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer())
            fail(ep, "expected a pair of node indices");
        const int a = e[0].get<int>(), b = e[1].get<int>();
        if (a < 1 || a > n || b < 1 || b > n) fail(ep, "node index out of range (1-based)");
        if (a == b) fail(ep, "self-loops are not allowed");
        edges.emplace_back(a - 1, b - 1);
    }
    return edges;
}

Topology read_topology(const json& j, int n, bool directed, const std::string& path) {
    const auto edges = read_edges(expect(j, "edges", path), n, path + ".edges");
    return directed ? Topology::directed_from_edges(n, edges)
                    : Topology::undirected_from_edges(n, edges);
}

json write_edges(const Topology& t) {
    json edges = json::array();
    for (int i = 0; i < t.node_count; ++i) {
        for (int k = 0; k < t.node_count; ++k) {
            if (t.adjacency(i, k) == 0.0) continue;
            if (!t.directed && k < i) continue;  // one entry per undirected edge
            // stored as (from, to); undirected pairs are symmetric anyway
            edges.push_back(json::array({k + 1, i + 1}));
        }
    }
    return edges;
}

NoiseSpec read_noise(const json& j, const std::string& path) {
    NoiseSpec spec;
    const std::string kind = expect(j, "kind", path).get<std::string>();
    if (kind == "none") {
        spec.kind = NoiseSpec::Kind::none;
    } else if (kind == "band_limited_white") {
        spec.kind = NoiseSpec::Kind::band_limited_white;
        spec.power = expect_number(expect(j, "power", path), path + ".power");
        spec.sample_time =
            expect_number(expect(j, "sample_time", path), path + ".sample_time");
        if (spec.power < 0.0) fail(path + ".power", "must be nonnegative");
        if (spec.sample_time <= 0.0) fail(path + ".sample_time", "must be positive");
    } else {
        fail(path + ".kind", "unknown noise kind '" + kind + "'");
    }
    return spec;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("parse error in '" + path + "': " + e.what());
    }

    Scenario sc;

    const json& jm = expect(j, "model", "$");
    Matrix A = read_matrix(expect(jm, "A", "model"), "model.A");
    Matrix B = read_matrix(expect(jm, "B", "model"), "model.B");
    Matrix D = read_matrix(expect(jm, "D", "model"), "model.D");
    if (B.rows() == 0) B = Matrix(A.rows(), 0);
    if (D.rows() == 0) D = Matrix(A.rows(), 0);
    const json& jnodes = expect(jm, "nodes", "model");
    if (!jnodes.is_array() || jnodes.empty()) fail("model.nodes", "expected a nonempty array");
    std::vector<Matrix> C;
    std::vector<std::vector<int>> known;
    for (size_t i = 0; i < jnodes.size(); ++i) {
        const std::string np = "model.nodes[" + std::to_string(i + 1) + "]";
        C.push_back(read_matrix(expect(jnodes[i], "C", np), np + ".C"));
        std::vector<int> ki;
        if (jnodes[i].contains("known_inputs")) {
            const json& jk = jnodes[i]["known_inputs"];
            if (!jk.is_array()) fail(np + ".known_inputs", "expected an array");
            for (const auto& v : jk) {
                if (!v.is_number_integer()) fail(np + ".known_inputs", "expected integers");
                const int idx = v.get<int>();
                if (idx < 1 || idx > B.cols())
                    fail(np + ".known_inputs", "input index out of range (1-based)");
                ki.push_back(idx - 1);
            }
        }
        known.push_back(std::move(ki));
    }
    try {
        sc.model = make_model(std::move(A), std::move(B), std::move(D), C, known);
    } catch (const NumericError& e) {
        throw ScenarioError(std::string("model: ") + e.what());
    }

    const json& jg = expect(j, "graph", "$");
    const int n_nodes = static_cast<int>(sc.model.node_count());
    int node_count = n_nodes;
    if (jg.contains("node_count")) {
        node_count = jg["node_count"].get<int>();
        if (node_count != n_nodes)
            fail("graph.node_count", "does not match the number of model nodes");
    }
    const bool directed = jg.contains("directed") && jg["directed"].get<bool>();
    try {
        if (jg.contains("switching")) {
            const json& js = jg["switching"];
            SwitchingSchedule sched;
            sched.dwell_time =
                expect_number(expect(js, "dwell_time", "graph.switching"),
                              "graph.switching.dwell_time");
            if (js.contains("start_index")) sched.start_index = js["start_index"].get<int>() - 1;
            const json& jt = expect(js, "topologies", "graph.switching");
            if (!jt.is_array() || jt.empty())
                fail("graph.switching.topologies", "expected a nonempty array");
            for (size_t k = 0; k < jt.size(); ++k)
                sched.topologies.push_back(read_topology(
                    jt[k], node_count, false,
                    "graph.switching.topologies[" + std::to_string(k + 1) + "]"));
            sched.validate();
            sc.graph = std::move(sched);
        } else {
            sc.graph = read_topology(jg, node_count, directed, "graph");
        }
    } catch (const NumericError& e) {
        throw ScenarioError(std::string("graph: ") + e.what());
    }

    if (j.contains("design")) {
        const json& jd = j["design"];
        ObserverDesign design;
        design.mode = topology_mode_from_string(
            expect(jd, "mode", "design").get<std::string>());
        design.chi = expect_number(expect(jd, "chi", "design"), "design.chi");
        const json& jdn = expect(jd, "nodes", "design");
        if (!jdn.is_array() || jdn.size() != static_cast<size_t>(n_nodes))
            fail("design.nodes", "expected one entry per model node");
        for (size_t i = 0; i < jdn.size(); ++i) {
            const std::string np = "design.nodes[" + std::to_string(i + 1) + "]";
            NodeGains g;
            g.H = read_matrix(expect(jdn[i], "H", np), np + ".H");
            g.M = read_matrix(expect(jdn[i], "M", np), np + ".M");
            g.N = read_matrix(expect(jdn[i], "N", np), np + ".N");
            g.L = read_matrix(expect(jdn[i], "L", np), np + ".L");
            g.P = read_matrix(expect(jdn[i], "P", np), np + ".P");
            for (const char* opt : {"K", "Y", "U", "V"}) {
                if (jdn[i].contains(opt)) {
                    Matrix m = read_matrix(jdn[i][opt], np + "." + opt);
                    if (std::string(opt) == "K") g.K = m;
                    else if (std::string(opt) == "Y") g.Y = m;
                    else if (std::string(opt) == "U") g.U = m;
                    else g.V = m;
                }
            }
            const int n = sc.model.state_dim();
            const auto p = sc.model.nodes[i].C.rows();
            if (g.H.rows() != n || g.H.cols() != p) fail(np + ".H", "dimension mismatch");
            if (g.M.rows() != n || g.M.cols() != n) fail(np + ".M", "dimension mismatch");
            if (g.N.rows() != n || g.N.cols() != n) fail(np + ".N", "dimension mismatch");
            if (g.L.rows() != n || g.L.cols() != p) fail(np + ".L", "dimension mismatch");
            if (g.P.rows() != n || g.P.cols() != n) fail(np + ".P", "dimension mismatch");
            design.nodes.push_back(std::move(g));
        }
        sc.design = std::move(design);
    }

    if (j.contains("run")) {
        const json& jr = j["run"];
        if (jr.contains("horizon")) sc.run.horizon = expect_number(jr["horizon"], "run.horizon");
        if (jr.contains("step")) sc.run.step = expect_number(jr["step"], "run.step");
        if (jr.contains("seed")) sc.run.seed = jr["seed"].get<std::uint64_t>();
        if (jr.contains("noise")) sc.run.noise = read_noise(jr["noise"], "run.noise");
        if (jr.contains("initial_state"))
            sc.run.initial_state = read_vector(jr["initial_state"], "run.initial_state");
        if (jr.contains("initial_observer_states")) {
            const json& jz = jr["initial_observer_states"];
            if (!jz.is_array()) fail("run.initial_observer_states", "expected an array");
            for (size_t i = 0; i < jz.size(); ++i)
                sc.run.initial_observer_states.push_back(read_vector(
                    jz[i], "run.initial_observer_states[" + std::to_string(i + 1) + "]"));
        }
        if (jr.contains("feedback_F"))
            sc.run.feedback_F = read_matrix(jr["feedback_F"], "run.feedback_F");
        if (jr.contains("verify_tol"))
            sc.run.verify_tol = expect_number(jr["verify_tol"], "run.verify_tol");
        if (sc.run.step <= 0.0) fail("run.step", "must be positive");
        if (sc.run.horizon < sc.run.step) fail("run.horizon", "must be at least one step");
    }

    if (j.contains("options")) {
        const json& jo = j["options"];
        auto num = [&](const char* key, double& target) {
            if (jo.contains(key)) target = expect_number(jo[key], std::string("options.") + key);
        };
        num("eps_rank", sc.options.numeric.eps_rank);
        num("boundary_tol", sc.options.numeric.boundary_tol);
        num("angle_tol", sc.options.numeric.angle_tol);
        num("chi_safety", sc.options.chi_safety);
        num("beta0", sc.options.beta0);
        num("piu_scale", sc.options.piu_scale);
        num("margin", sc.options.injection.margin);
        num("riccati_weight", sc.options.injection.riccati_weight);
        if (jo.contains("beta_max_doublings"))
            sc.options.beta_max_doublings = jo["beta_max_doublings"].get<int>();
        if (jo.contains("beta_extra_doublings"))
            sc.options.beta_extra_doublings = jo["beta_extra_doublings"].get<int>();
        if (jo.contains("Y_overrides")) {
            const json& jy = jo["Y_overrides"];
            if (!jy.is_array()) fail("options.Y_overrides", "expected an array");
            for (size_t i = 0; i < jy.size(); ++i) {
                Matrix Y;
                if (!jy[i].is_null())
                    Y = read_matrix(jy[i], "options.Y_overrides[" + std::to_string(i + 1) + "]");
                sc.options.Y_per_node.push_back(std::move(Y));
            }
        }
    }
    return sc;
}

void save_scenario(const std::string& path, const Scenario& sc) {
    json j;
    json jm;
    jm["A"] = write_matrix(sc.model.A);
    jm["B"] = write_matrix(sc.model.B);
    jm["D"] = write_matrix(sc.model.D);
    json jnodes = json::array();
    for (const NodeIO& node : sc.model.nodes) {
        json jn;
        jn["C"] = write_matrix(node.C);
        json jk = json::array();
        for (int k : node.known_inputs) jk.push_back(k + 1);
        jn["known_inputs"] = std::move(jk);
        jnodes.push_back(std::move(jn));
    }
    jm["nodes"] = std::move(jnodes);
    j["model"] = std::move(jm);

    json jg;
    if (std::holds_alternative<SwitchingSchedule>(sc.graph)) {
        const auto& sched = std::get<SwitchingSchedule>(sc.graph);
        jg["directed"] = false;
        jg["node_count"] = sc.model.node_count();
        json js;
        js["dwell_time"] = sched.dwell_time;
        js["start_index"] = sched.start_index + 1;
        json jt = json::array();
        for (const Topology& t : sched.topologies) {
            json je;
            je["edges"] = write_edges(t);
            jt.push_back(std::move(je));
        }
        js["topologies"] = std::move(jt);
        jg["switching"] = std::move(js);
    } else {
        const auto& topo = std::get<Topology>(sc.graph);
        jg["directed"] = topo.directed;
        jg["node_count"] = topo.node_count;
        jg["edges"] = write_edges(topo);
    }
    j["graph"] = std::move(jg);

    if (sc.design) {
        json jd;
        jd["mode"] = to_string(sc.design->mode);
        jd["chi"] = sc.design->chi;
        json jdn = json::array();
        for (const NodeGains& g : sc.design->nodes) {
            json jn;
            jn["H"] = write_matrix(g.H);
            jn["M"] = write_matrix(g.M);
            jn["N"] = write_matrix(g.N);
            jn["L"] = write_matrix(g.L);
            jn["P"] = write_matrix(g.P);
            if (g.K.size()) jn["K"] = write_matrix(g.K);
            if (g.Y.size()) jn["Y"] = write_matrix(g.Y);
            if (g.U.size()) jn["U"] = write_matrix(g.U);
            if (g.V.size()) jn["V"] = write_matrix(g.V);
            jdn.push_back(std::move(jn));
        }
        jd["nodes"] = std::move(jdn);
        j["design"] = std::move(jd);
    }

    json jr;
    jr["horizon"] = sc.run.horizon;
    jr["step"] = sc.run.step;
    jr["seed"] = sc.run.seed;
    json jn;
    jn["kind"] = sc.run.noise.kind == NoiseSpec::Kind::none ? "none" : "band_limited_white";
    if (sc.run.noise.kind != NoiseSpec::Kind::none) {
        jn["power"] = sc.run.noise.power;
        jn["sample_time"] = sc.run.noise.sample_time;
    }
    jr["noise"] = std::move(jn);
    if (sc.run.initial_state.size()) jr["initial_state"] = write_vector(sc.run.initial_state);
    if (!sc.run.initial_observer_states.empty()) {
        json jz = json::array();
        for (const Vector& z : sc.run.initial_observer_states) jz.push_back(write_vector(z));
        jr["initial_observer_states"] = std::move(jz);
    }
    if (sc.run.feedback_F.size()) jr["feedback_F"] = write_matrix(sc.run.feedback_F);
    jr["verify_tol"] = sc.run.verify_tol;
    j["run"] = std::move(jr);

    json jo;
    jo["eps_rank"] = sc.options.numeric.eps_rank;
    jo["boundary_tol"] = sc.options.numeric.boundary_tol;
    jo["angle_tol"] = sc.options.numeric.angle_tol;
    jo["chi_safety"] = sc.options.chi_safety;
    jo["beta0"] = sc.options.beta0;
    jo["beta_max_doublings"] = sc.options.beta_max_doublings;
    jo["beta_extra_doublings"] = sc.options.beta_extra_doublings;
    jo["piu_scale"] = sc.options.piu_scale;
    jo["margin"] = sc.options.injection.margin;
    jo["riccati_weight"] = sc.options.injection.riccati_weight;
    j["options"] = std::move(jo);

    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file '" + path + "'");
    out << j.dump(1) << "\n";
}

ScenarioConfig scenario_config(const Scenario& sc) {
    if (!sc.design) throw ScenarioError("scenario has no design block");
    ScenarioConfig cfg;
    cfg.model = sc.model;
    cfg.design = *sc.design;
    cfg.topology = sc.graph;
    cfg.feedback_F = sc.run.feedback_F;
    cfg.noise = sc.run.noise;
    cfg.horizon = sc.run.horizon;
    cfg.step = sc.run.step;
    cfg.initial_plant_state = sc.run.initial_state;
    cfg.initial_observer_states = sc.run.initial_observer_states;
    cfg.seed = sc.run.seed;
    cfg.verify_tol = sc.run.verify_tol;
    return cfg;
}

double chi_graph_quantity(const std::variant<Topology, SwitchingSchedule>& graph,
                          TopologyMode mode) {
    switch (mode) {
        case TopologyMode::fixed_undirected: {
            const auto& t = std::get<Topology>(graph);
            return algebraic_connectivity(laplacian(t));
        }
        case TopologyMode::switching: {
            const auto& s = std::get<SwitchingSchedule>(graph);
            return connectivity_floor(s.topologies.front().node_count);
        }
        case TopologyMode::directed: {
            const auto& t = std::get<Topology>(graph);
            const PerronWeighting pw = perron_weights(t);
            return 0.5 * algebraic_connectivity(pw.L_hat);
        }
    }
    throw NumericError("invalid_mode", "chi_graph_quantity");
}

double chi_graph_quantity(const Scenario& sc, TopologyMode mode) {
    return chi_graph_quantity(sc.graph, mode);
}

TopologyMode implied_mode(const Scenario& sc) {
    if (std::holds_alternative<SwitchingSchedule>(sc.graph)) return TopologyMode::switching;
    return std::get<Topology>(sc.graph).directed ? TopologyMode::directed
                                                 : TopologyMode::fixed_undirected;
}

}  // namespace duio
