#pragma once

#include <span>
#include <vector>

#include "mcpflow/hierarchical.hpp"
#include "mcpflow/sequence.hpp"

namespace mcpflow {

// First-order chain over labels 1..K. transition[i][j] = P(j+1 | i+1).
struct TransitionTable {
    int size = 0;
    std::vector<std::vector<double>> transition;
    std::vector<double> initial;
};

// Counts consecutive label pairs. For durations the chain runs over d_2, d_3,
// ... within each sequence, skipping the null first label. Rows without
// outgoing transitions are uniform.
TransitionTable mc_fit(std::span<const EventSequence> sequences, int catalog_size, LabelHead head);

// Row argmax, ties to the smallest label.
int mc_predict(const TransitionTable& table, int current_label);

}  // namespace mcpflow
