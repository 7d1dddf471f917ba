#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "mcpflow/admm.hpp"
#include "mcpflow/hierarchical.hpp"
#include "mcpflow/kernel.hpp"
#include "mcpflow/markov.hpp"

namespace mcpflow {

enum class ModelKind { PointProcess, Markov, Hierarchical };

std::string_view to_string(ModelKind kind);

// Anything that yields next-state and next-duration distributions for a
// sequence at time t after its first history_len events.
class FlowModel {
public:
    virtual ~FlowModel() = default;

    virtual ModelKind kind() const = 0;
    virtual LabelSpace labels() const = 0;
    virtual Eigen::VectorXd state_distribution(const EventSequence& seq, std::size_t history_len,
                                               double t) const = 0;
    virtual Eigen::VectorXd duration_distribution(const EventSequence& seq,
                                                  std::size_t history_len, double t) const = 0;
};

// DMCP and its kernel variants (SCP, MPP, LR).
class PointProcessModel final : public FlowModel {
public:
    PointProcessModel(ParameterMatrix parameters, KernelConfig kernel, FeatureLayout layout);

    ModelKind kind() const override { return ModelKind::PointProcess; }
    LabelSpace labels() const override { return parameters_.labels; }
    Eigen::VectorXd state_distribution(const EventSequence& seq, std::size_t history_len,
                                       double t) const override;
    Eigen::VectorXd duration_distribution(const EventSequence& seq, std::size_t history_len,
                                          double t) const override;

    const ParameterMatrix& parameters() const noexcept { return parameters_; }
    const KernelConfig& kernel() const noexcept { return kernel_; }
    const FeatureLayout& layout() const noexcept { return layout_; }

    SolverReport report;

private:
    FeatureVector feature(const EventSequence& seq, std::size_t history_len, double t) const;

    ParameterMatrix parameters_;
    KernelConfig kernel_;
    FeatureLayout layout_;
};

class MarkovModel final : public FlowModel {
public:
    MarkovModel(TransitionTable states, TransitionTable durations);

    ModelKind kind() const override { return ModelKind::Markov; }
    LabelSpace labels() const override { return {states_.size, durations_.size}; }
    Eigen::VectorXd state_distribution(const EventSequence& seq, std::size_t history_len,
                                       double t) const override;
    Eigen::VectorXd duration_distribution(const EventSequence& seq, std::size_t history_len,
                                          double t) const override;

    const TransitionTable& state_table() const noexcept { return states_; }
    const TransitionTable& duration_table() const noexcept { return durations_; }

private:
    TransitionTable states_;
    TransitionTable durations_;
};

// Distributions are one-hot at the chain's verdict.
class HierarchicalModel final : public FlowModel {
public:
    HierarchicalModel(HierarchicalChain states, HierarchicalChain durations, LabelSpace labels,
                      KernelConfig kernel, FeatureLayout layout);

    ModelKind kind() const override { return ModelKind::Hierarchical; }
    LabelSpace labels() const override { return labels_; }
    Eigen::VectorXd state_distribution(const EventSequence& seq, std::size_t history_len,
                                       double t) const override;
    Eigen::VectorXd duration_distribution(const EventSequence& seq, std::size_t history_len,
                                          double t) const override;

    const HierarchicalChain& state_chain() const noexcept { return states_; }
    const HierarchicalChain& duration_chain() const noexcept { return durations_; }
    const KernelConfig& kernel() const noexcept { return kernel_; }
    const FeatureLayout& layout() const noexcept { return layout_; }

private:
    HierarchicalChain states_;
    HierarchicalChain durations_;
    LabelSpace labels_;
    KernelConfig kernel_;
    FeatureLayout layout_;
};

// 1-based argmax, ties to the smallest label.
int argmax_label(const Eigen::VectorXd& probabilities);

}  // namespace mcpflow
