#include "duio/simulate.hpp"

#include <cmath>
#include <random>

namespace duio {

namespace {

// Zero-order-hold band-limited white noise: one normal draw per sample
// interval and channel, variance power / sample_time. Drawn up front so the
// value at a given absolute time does not depend on the integration step.
class HeldNoise {
public:
    HeldNoise(const NoiseSpec& spec, int channels, double horizon, std::uint64_t seed)
        : spec_(spec), channels_(channels) {
        if (spec.kind == NoiseSpec::Kind::none || channels == 0) return;
        if (spec.sample_time <= 0.0)
            throw NumericError("invalid_noise", "sample_time must be positive");
        const int count = static_cast<int>(std::ceil(horizon / spec.sample_time)) + 2;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist(0.0, std::sqrt(spec.power / spec.sample_time));
        samples_.resize(channels, count);
        for (int k = 0; k < count; ++k)
            for (int c = 0; c < channels; ++c) samples_(c, k) = dist(rng);
    }

    Vector at(double t) const {
        if (samples_.size() == 0) return Vector::Zero(channels_);
        int k = static_cast<int>(std::floor(t / spec_.sample_time));
        k = std::max(0, std::min(k, static_cast<int>(samples_.cols()) - 1));
        return samples_.col(k);
    }

private:
    NoiseSpec spec_;
    int channels_;
    Matrix samples_;
};

struct NodeRuntime {
    Matrix N, L, H, C;
    Matrix MB;          // M_i * B_known_i
    Matrix Pinv;
    std::vector<int> known;
    double couple = 0.0;  // chi, or chi * r_i for directed graphs
};

}  // namespace

SimulationTrace simulate(const ScenarioConfig& config,
                         const DisturbanceSignal& extra_disturbance) {
    const SystemModel& model = config.model;
    const ObserverDesign& design = config.design;
    const int n = model.state_dim();
    const int m = model.input_dim();
    const int q = model.disturbance_dim();
    const int N = model.node_count();
    if (config.step <= 0.0 || config.horizon < config.step)
        throw NumericError("invalid_config", "require step > 0 and horizon >= step");
    if (config.noise.kind != NoiseSpec::Kind::none &&
        config.noise.sample_time < config.step)
        throw NumericError("invalid_noise", "sample_time must be >= step");

    const auto report = verify_existing_design(model, design, config.verify_tol);
    if (!report.pass)
        throw NumericError("unverified_design", report.failure);

    // Topology mode must match the design mode.
    const SwitchingSchedule* schedule = nullptr;
    Topology fixed;
    Vector perron = Vector::Ones(N);
    if (std::holds_alternative<SwitchingSchedule>(config.topology)) {
        if (design.mode != TopologyMode::switching)
            throw NumericError("mode_mismatch", "schedule given but design mode is not switching");
        schedule = &std::get<SwitchingSchedule>(config.topology);
        schedule->validate();
        const double ratio = schedule->dwell_time / config.step;
        if (std::abs(ratio - std::round(ratio)) > 1e-6)
            throw NumericError("invalid_schedule",
                               "dwell_time must be an integer multiple of the step");
    } else {
        fixed = std::get<Topology>(config.topology);
        fixed.validate();
        if (design.mode == TopologyMode::directed) {
            if (!fixed.directed)
                throw NumericError("mode_mismatch", "directed design needs a directed graph");
            perron = perron_weights(fixed).r;
        } else if (design.mode == TopologyMode::fixed_undirected) {
            if (fixed.directed)
                throw NumericError("mode_mismatch", "undirected design given a directed graph");
            if (!is_connected(fixed))
                throw NumericError("invalid_topology", "graph is disconnected");
        } else {
            throw NumericError("mode_mismatch", "switching design needs a schedule");
        }
    }

    std::vector<NodeRuntime> rt(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
        const NodeGains& g = design.nodes[static_cast<size_t>(i)];
        NodeRuntime& r = rt[static_cast<size_t>(i)];
        r.N = g.N;
        r.L = g.L;
        r.H = g.H;
        r.C = model.nodes[static_cast<size_t>(i)].C;
        r.MB = g.M * model.nodes[static_cast<size_t>(i)].B_known;
        r.Pinv = g.P.llt().solve(Matrix::Identity(n, n));
        r.known = model.nodes[static_cast<size_t>(i)].known_inputs;
        r.couple = design.chi * perron(i);
    }

    Vector x0 = config.initial_plant_state.size()
                    ? config.initial_plant_state
                    : Vector::Zero(n);
    if (x0.size() != n) throw NumericError("invalid_config", "initial plant state size");
    Vector state((N + 1) * n);
    state.head(n) = x0;
    for (int i = 0; i < N; ++i) {
        Vector z0 = Vector::Zero(n);
        if (static_cast<size_t>(i) < config.initial_observer_states.size() &&
            config.initial_observer_states[static_cast<size_t>(i)].size() != 0)
            z0 = config.initial_observer_states[static_cast<size_t>(i)];
        if (z0.size() != n) throw NumericError("invalid_config", "initial observer state size");
        state.segment((i + 1) * n, n) = z0;
    }

    HeldNoise noise(config.noise, q, config.horizon, config.seed);
    const bool has_F = config.feedback_F.size() != 0;
    if (has_F && (config.feedback_F.rows() != m || config.feedback_F.cols() != n))
        throw NumericError("invalid_config", "feedback F must be m x n");

    const int steps = static_cast<int>(std::round(config.horizon / config.step));
    const double h = config.step;

    SimulationTrace trace;
    trace.times.resize(steps + 1);
    trace.x.resize(n, steps + 1);
    trace.x_hat.assign(static_cast<size_t>(N), Matrix(n, steps + 1));
    trace.V.resize(steps + 1);
    trace.active_topology.resize(steps + 1);

    std::vector<Vector> xhat(static_cast<size_t>(N), Vector(n));
    const Matrix* adj = &fixed.adjacency;

    auto deriv = [&](double t, const Vector& s, Vector& ds) {
        const auto x = s.head(n);
        Vector u = has_F ? Vector(-(config.feedback_F * x)) : Vector::Zero(m);
        Vector w = noise.at(t);
        if (extra_disturbance) w += extra_disturbance(t);
        ds.head(n) = model.A * x + model.B * u + model.D * w;
        for (int i = 0; i < N; ++i)
            xhat[static_cast<size_t>(i)] =
                s.segment((i + 1) * n, n) + rt[static_cast<size_t>(i)].H *
                                                (rt[static_cast<size_t>(i)].C * x);
        for (int i = 0; i < N; ++i) {
            const NodeRuntime& r = rt[static_cast<size_t>(i)];
            Vector consensus = Vector::Zero(n);
            for (int j = 0; j < N; ++j) {
                const double a = (*adj)(i, j);
                if (a != 0.0)
                    consensus += a * (xhat[static_cast<size_t>(j)] - xhat[static_cast<size_t>(i)]);
            }
            Vector dz = r.N * s.segment((i + 1) * n, n) + r.L * (r.C * x) +
                        r.couple * (r.Pinv * consensus);
            for (size_t k = 0; k < r.known.size(); ++k)
                dz += r.MB.col(static_cast<int>(k)) * u(r.known[k]);
            ds.segment((i + 1) * n, n) = dz;
        }
    };

    auto record = [&](int k, double t, int topo_idx) {
        trace.times(k) = t;
        const auto x = state.head(n);
        trace.x.col(k) = x;
        double V = 0.0;
        for (int i = 0; i < N; ++i) {
            const Vector xh = state.segment((i + 1) * n, n) +
                              rt[static_cast<size_t>(i)].H *
                                  (rt[static_cast<size_t>(i)].C * x);
            trace.x_hat[static_cast<size_t>(i)].col(k) = xh;
            const Vector e = x - xh;
            V += e.dot(design.nodes[static_cast<size_t>(i)].P * e);
        }
        trace.V(k) = V;
        trace.active_topology(k) = topo_idx;
    };

    Vector k1(state.size()), k2(state.size()), k3(state.size()), k4(state.size());
    Vector tmp(state.size());
    int topo_idx = schedule ? schedule->active_index(0.0) : 0;
    record(0, 0.0, topo_idx);
    for (int k = 0; k < steps; ++k) {
        const double t = k * h;
        if (schedule) {
            topo_idx = schedule->active_index(t);
            adj = &schedule->topologies[static_cast<size_t>(topo_idx)].adjacency;
        }
        deriv(t, state, k1);
        tmp = state + 0.5 * h * k1;
        deriv(t + 0.5 * h, tmp, k2);
        tmp = state + 0.5 * h * k2;
        deriv(t + 0.5 * h, tmp, k3);
        tmp = state + h * k3;
        deriv(t + h, tmp, k4);
        state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!state.allFinite()) throw BlowUpError((k + 1) * h);
        record(k + 1, (k + 1) * h, schedule ? schedule->active_index((k + 1) * h) : 0);
    }
    return trace;
}

Vector lyapunov_trace(const SimulationTrace& trace, const ObserverDesign& design) {
    const int T = trace.samples();
    Vector V(T);
    for (int k = 0; k < T; ++k) {
        double v = 0.0;
        for (size_t i = 0; i < design.nodes.size(); ++i) {
            const Vector e = trace.error(static_cast<int>(i), k);
            v += e.dot(design.nodes[i].P * e);
        }
        V(k) = v;
    }
    return V;
}

double decoupling_probe(const ScenarioConfig& config, const DisturbanceSignal& w_a,
                        const DisturbanceSignal& w_b) {
    const SimulationTrace ta = simulate(config, w_a);
    const SimulationTrace tb = simulate(config, w_b);
    double worst = 0.0;
    const int N = static_cast<int>(ta.x_hat.size());
    for (int k = 0; k < ta.samples(); ++k)
        for (int i = 0; i < N; ++i)
            worst = std::max(worst, (ta.error(i, k) - tb.error(i, k)).norm());
    return worst;
}

ErrorMetrics error_metrics(const SimulationTrace& trace) {
    ErrorMetrics out;
    const int T = trace.samples();
    const int N = static_cast<int>(trace.x_hat.size());
    if (T == 0) throw NumericError("empty_trace", "error_metrics");
    double init_sq = 0.0, term_sq = 0.0;
    for (int i = 0; i < N; ++i) {
        NodeMetrics nm;
        nm.initial_error = trace.error_norm(i, 0);
        for (int k = 0; k < T; ++k) {
            const double e = trace.error_norm(i, k);
            nm.peak_error = std::max(nm.peak_error, e);
            if (nm.time_to_1e3 < 0.0 && e <= 1e-3 * nm.initial_error)
                nm.time_to_1e3 = trace.times(k);
        }
        nm.terminal_error = trace.error_norm(i, T - 1);
        init_sq += nm.initial_error * nm.initial_error;
        term_sq += nm.terminal_error * nm.terminal_error;
        out.nodes.push_back(nm);
    }
    out.terminal_ratio = init_sq > 0.0 ? std::sqrt(term_sq / init_sq) : 0.0;
    out.diverged = term_sq > init_sq;
    // Non-increase up to a small relative slack for integration error.
    const double slack = 1e-9 * trace.V.maxCoeff() + 1e-14;
    for (int k = 1; k < T; ++k) {
        if (trace.V(k) > trace.V(k - 1) + slack) {
            out.v_monotone = false;
            break;
        }
    }
    return out;
}

}  // namespace duio
