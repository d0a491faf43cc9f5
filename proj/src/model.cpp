#include "duio/model.hpp"

#include <algorithm>

#include "duio/linalg.hpp"

namespace duio {

SystemModel make_model(Matrix A, Matrix B, Matrix D,
                       const std::vector<Matrix>& C,
                       const std::vector<std::vector<int>>& known_inputs,
                       const NumericOptions& opts) {
    if (C.size() != known_inputs.size())
        throw NumericError("dimension_mismatch", "one known-input list per node required");
    SystemModel model;
    model.A = std::move(A);
    model.B = std::move(B);
    model.D = std::move(D);
    const int n = model.state_dim();
    const int m = model.input_dim();
    for (size_t i = 0; i < C.size(); ++i) {
        NodeIO node;
        node.C = C[i];
        node.known_inputs = known_inputs[i];
        std::sort(node.known_inputs.begin(), node.known_inputs.end());
        for (int k : node.known_inputs) {
            if (k < 0 || k >= m)
                throw NumericError("invalid_model",
                                   "known-input index out of range at node " + std::to_string(i + 1));
        }
        std::vector<int> unknown;
        for (int k = 0; k < m; ++k) {
            if (!std::binary_search(node.known_inputs.begin(), node.known_inputs.end(), k))
                unknown.push_back(k);
        }
        node.B_known.resize(n, static_cast<int>(node.known_inputs.size()));
        for (size_t k = 0; k < node.known_inputs.size(); ++k)
            node.B_known.col(static_cast<int>(k)) = model.B.col(node.known_inputs[k]);
        node.B_unknown.resize(n, static_cast<int>(unknown.size()));
        for (size_t k = 0; k < unknown.size(); ++k)
            node.B_unknown.col(static_cast<int>(k)) = model.B.col(unknown[k]);
        node.B_bar.resize(n, node.B_unknown.cols() + model.D.cols());
        node.B_bar << node.B_unknown, model.D;
        model.nodes.push_back(std::move(node));
    }
    validate_model(model, opts);
    return model;
}

void validate_model(const SystemModel& model, const NumericOptions& opts) {
    const int n = model.state_dim();
    if (model.A.cols() != n) throw NumericError("invalid_model", "A must be square");
    if (model.B.rows() != n) throw NumericError("invalid_model", "B row count");
    if (model.D.rows() != n) throw NumericError("invalid_model", "D row count");
    if (!all_finite(model.A) || !all_finite(model.B) || !all_finite(model.D))
        throw NumericError("invalid_model", "non-finite plant data");
    if (model.nodes.empty()) throw NumericError("invalid_model", "at least one node required");
    for (size_t i = 0; i < model.nodes.size(); ++i) {
        const NodeIO& node = model.nodes[i];
        if (node.C.cols() != n)
            throw NumericError("invalid_model", "C column count at node " + std::to_string(i + 1));
        if (!all_finite(node.C))
            throw NumericError("invalid_model", "non-finite C at node " + std::to_string(i + 1));
        // Assumption 1: B_bar full column rank (vacuous when it has no columns).
        if (node.B_bar.cols() > 0 &&
            numerical_rank(node.B_bar, opts.eps_rank) != node.B_bar.cols())
            throw NumericError("invalid_model",
                               "B_bar rank-deficient at node " + std::to_string(i + 1));
    }
}

}  // namespace duio
