#include "mcpflow/model.hpp"

#include "mcpflow/error.hpp"
#include "mcpflow/features.hpp"
#include "mcpflow/objective.hpp"

namespace mcpflow {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::PointProcess: return "point_process";
        case ModelKind::Markov: return "markov_chain";
        case ModelKind::Hierarchical: return "hierarchical";
    }
    return "?";
}

int argmax_label(const Eigen::VectorXd& probabilities) {
    if (probabilities.size() == 0) throw InvalidArgument("argmax_label: empty distribution");
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < probabilities.size(); ++k)
        if (probabilities[k] > probabilities[best]) best = k;
    return static_cast<int>(best) + 1;
}

PointProcessModel::PointProcessModel(ParameterMatrix parameters, KernelConfig kernel,
                                     FeatureLayout layout)
    : parameters_(std::move(parameters)), kernel_(kernel), layout_(layout) {
    kernel_.validate();
    if (parameters_.rows() != layout_.total())
        throw InvalidArgument("model has " + std::to_string(parameters_.rows()) +
                              " parameter rows but the feature layout has " +
                              std::to_string(layout_.total()) + " dimensions");
}

FeatureVector PointProcessModel::feature(const EventSequence& seq, std::size_t history_len,
                                         double t) const {
    return build_feature(seq, history_len, t, kernel_, layout_);
}

Eigen::VectorXd PointProcessModel::state_distribution(const EventSequence& seq,
                                                      std::size_t history_len, double t) const {
    return class_probabilities(parameters_.state_block(), feature(seq, history_len, t));
}

Eigen::VectorXd PointProcessModel::duration_distribution(const EventSequence& seq,
                                                         std::size_t history_len, double t) const {
    if (parameters_.durations() == 0) throw InvalidArgument("model has no duration heads");
    return class_probabilities(parameters_.duration_block(), feature(seq, history_len, t));
}

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd one_hot(int label, int size) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(size);
    p[label - 1] = 1.0;
    return p;
}

}  // namespace

MarkovModel::MarkovModel(TransitionTable states, TransitionTable durations)
    : states_(std::move(states)), durations_(std::move(durations)) {}

Eigen::VectorXd MarkovModel::state_distribution(const EventSequence& seq, std::size_t history_len,
                                                double) const {
    if (history_len > seq.events.size()) throw InvalidArgument("history_len out of range");
    if (history_len == 0) return to_vector(states_.initial);
    const int current = seq.events[history_len - 1].state;
    if (current < 1 || current > states_.size) throw InvalidArgument("state outside catalog");
    return to_vector(states_.transition[static_cast<std::size_t>(current - 1)]);
}

Eigen::VectorXd MarkovModel::duration_distribution(const EventSequence& seq,
                                                   std::size_t history_len, double) const {
    if (history_len > seq.events.size()) throw InvalidArgument("history_len out of range");
    const int current = history_len == 0 ? kNullDuration : seq.events[history_len - 1].duration;
    if (current == kNullDuration) return to_vector(durations_.initial);
    if (current < 1 || current > durations_.size) throw InvalidArgument("duration outside catalog");
    return to_vector(durations_.transition[static_cast<std::size_t>(current - 1)]);
}

HierarchicalModel::HierarchicalModel(HierarchicalChain states, HierarchicalChain durations,
                                     LabelSpace labels, KernelConfig kernel, FeatureLayout layout)
    : states_(std::move(states)),
      durations_(std::move(durations)),
      labels_(labels),
      kernel_(kernel),
      layout_(layout) {
    kernel_.validate();
}

Eigen::VectorXd HierarchicalModel::state_distribution(const EventSequence& seq,
                                                      std::size_t history_len, double t) const {
    const auto f = build_feature(seq, history_len, t, kernel_, layout_);
    return one_hot(hierarchical_predict(states_, f), labels_.states);
}

Eigen::VectorXd HierarchicalModel::duration_distribution(const EventSequence& seq,
                                                         std::size_t history_len, double t) const {
    const auto f = build_feature(seq, history_len, t, kernel_, layout_);
    return one_hot(hierarchical_predict(durations_, f), labels_.durations);
}

}  // namespace mcpflow
