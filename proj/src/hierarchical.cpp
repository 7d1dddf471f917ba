#include "mcpflow/hierarchical.hpp"

#include <algorithm>
#include <map>

#include "mcpflow/error.hpp"
#include "mcpflow/objective.hpp"

namespace mcpflow {

namespace {

int label_of(const TrainSample& s, LabelHead head) {
    return head == LabelHead::State ? s.state : s.duration;
}

}  // namespace

std::vector<int> HierarchicalChain::order() const {
    std::vector<int> out;
    for (const auto& step : steps) out.push_back(step.majority);
    out.push_back(final_class);
    return out;
}

HierarchicalChain hierarchical_fit(std::span<const TrainSample> samples, LabelHead head,
                                   const SolverConfig& config) {
    std::map<int, std::size_t> counts;
    for (const auto& s : samples) {
        const int label = label_of(s, head);
        if (label != kNullDuration) ++counts[label];
    }
    if (counts.size() < 2)
        throw InvalidArgument("hierarchical_fit: need at least two classes, got " +
                              std::to_string(counts.size()));

    std::vector<std::pair<int, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    HierarchicalChain chain;
    chain.head = head;
    chain.final_class = ranked.back().first;

    std::vector<TrainSample> remaining;
    for (const auto& s : samples)
        if (label_of(s, head) != kNullDuration) remaining.push_back(s);

    for (std::size_t k = 0; k + 1 < ranked.size(); ++k) {
        const int majority = ranked[k].first;
        std::vector<TrainSample> binary = remaining;
        for (auto& s : binary) {
            s.state = label_of(s, head) == majority ? 1 : 2;
            s.duration = kNullDuration;
        }
        FitResult fit = admm_fit(binary, LabelSpace{2, 0}, config);
        chain.steps.push_back({majority, std::move(fit.parameters)});
        std::erase_if(remaining, [&](const TrainSample& s) { return label_of(s, head) == majority; });
    }
    return chain;
}

int hierarchical_predict(const HierarchicalChain& chain, const FeatureVector& f) {
    for (const auto& step : chain.steps) {
        const Eigen::VectorXd p = class_probabilities(step.model.values, f);
        if (p[0] >= p[1]) return step.majority;
    }
    return chain.final_class;
}

}  // namespace mcpflow
