#pragma once

// Plant description with per-node output maps and known/unknown input
// partitions.

#include <vector>

#include "duio/types.hpp"

namespace duio {

// Per-node measurement and input knowledge. B_known holds the columns of B
// whose input components the node measures locally; B_unknown the remaining
// columns; B_bar = [B_unknown  D] collects every channel the node cannot see.
struct NodeIO {
    Matrix C;                     // p_i x n
    std::vector<int> known_inputs;  // column indices into B
    Matrix B_known;               // n x r_i
    Matrix B_unknown;             // n x d_i
    Matrix B_bar;                 // n x (d_i + q)
};

struct SystemModel {
    Matrix A;  // n x n
    Matrix B;  // n x m
    Matrix D;  // n x q
    std::vector<NodeIO> nodes;

    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }
    int disturbance_dim() const { return static_cast<int>(D.cols()); }
    int node_count() const { return static_cast<int>(nodes.size()); }
};

// Derives B_known / B_unknown / B_bar from the declared known-input column
// indices and validates dimensions and Assumption-1 (full column rank of
// B_bar; zero-column B_bar allowed).
SystemModel make_model(Matrix A, Matrix B, Matrix D,
                       const std::vector<Matrix>& C,
                       const std::vector<std::vector<int>>& known_inputs,
                       const NumericOptions& opts = {});

void validate_model(const SystemModel& model, const NumericOptions& opts = {});

}  // namespace duio
