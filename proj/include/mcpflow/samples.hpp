#pragma once

#include <span>
#include <vector>

#include "mcpflow/features.hpp"

namespace mcpflow {

// Pre-composition view of a training sample, used by the synthetic
// oversampler: binary profile bits, the binary features of the event at the
// evaluation point, the evaluation time and the elapsed time g acts on.
struct RawFeatures {
    std::vector<int> static_features;
    std::vector<int> event_features;
    double eval_time = 0.0;
    double elapsed = 0.0;
};

struct TrainSample {
    FeatureVector feature;
    int state = 1;
    int duration = kNullDuration;
    double weight = 1.0;
    bool synthetic = false;
    RawFeatures raw;
};

// One sample per event i >= 2 of every sequence: the feature evaluated at
// t_{i-1} over history events 1..i-1, labelled with (c_i, d_i).
std::vector<TrainSample> build_training_samples(std::span<const EventSequence> sequences,
                                                const KernelConfig& kernel,
                                                const FeatureLayout& layout);

// Mean dwell time t_i - t_{i-1} over all transitions, used as the MCP
// bandwidth when sigma is "auto".
double mean_dwell_days(std::span<const EventSequence> sequences);

}  // namespace mcpflow
