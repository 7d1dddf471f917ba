#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "mcpflow/kernel.hpp"
#include "mcpflow/sequence.hpp"

namespace mcpflow {

using FeatureVector = Eigen::VectorXd;

// Time of the latest of the first history_len events that lies strictly
// before t; 0 when there is none.
double last_event_before(const EventSequence& seq, std::size_t history_len, double t);

// f_t = [ f_0 * g(t) ; sum_{i <= history_len} h(t, t_i) f_i ].
// Only the first history_len events contribute; an event at exactly t is
// included with weight h(t, t) = 1.
FeatureVector build_feature(const EventSequence& seq, std::size_t history_len, double t,
                            const KernelConfig& config, const FeatureLayout& layout);

}  // namespace mcpflow
