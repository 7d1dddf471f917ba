#pragma once

#include <span>
#include <vector>

#include "mcpflow/admm.hpp"

namespace mcpflow {

enum class LabelHead { State, Duration };

// One MAJORITY-vs-MINORITY step. Column 0 of the binary model is MAJORITY.
struct HierarchyStep {
    int majority = 0;
    ParameterMatrix model;  // M x 2, no duration heads
};

struct HierarchicalChain {
    LabelHead head = LabelHead::State;
    std::vector<HierarchyStep> steps;
    int final_class = 0;

    // Classes in ranked order, final_class last.
    std::vector<int> order() const;
};

// Ranks classes by descending count (ties to the smaller label) and fits one
// binary model per step, dropping that step's majority samples afterwards.
HierarchicalChain hierarchical_fit(std::span<const TrainSample> samples, LabelHead head,
                                   const SolverConfig& config);

// Walks the chain and returns the first MAJORITY verdict, else the final class.
int hierarchical_predict(const HierarchicalChain& chain, const FeatureVector& f);

}  // namespace mcpflow
