#pragma once

#include <cstdint>
#include <vector>

#include "mcpflow/parameter_matrix.hpp"
#include "mcpflow/random.hpp"
#include "mcpflow/samples.hpp"

namespace mcpflow::testing {

inline Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
    return m;
}

// Samples with dense random features in [0, 2) and uniform labels; every
// third sample has a null duration when with_null is set.
inline std::vector<TrainSample> random_samples(Rng& rng, int n, int rows, LabelSpace labels,
                                               bool with_null = true) {
    std::vector<TrainSample> out;
    for (int i = 0; i < n; ++i) {
        TrainSample s;
        s.feature = Eigen::VectorXd(rows);
        for (int m = 0; m < rows; ++m) s.feature(m) = rng.uniform(0.0, 2.0);
        s.state = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(labels.states)));
        s.duration = (with_null && i % 3 == 0)
                         ? kNullDuration
                         : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(labels.durations)));
        s.weight = rng.uniform(0.5, 1.5);
        out.push_back(std::move(s));
    }
    return out;
}

// Sequence with events at the given times; states/durations cycle, features
// follow a fixed pattern.
inline EventSequence toy_sequence(const std::vector<double>& times, int states, int durations,
                                  int dynamic_dim, std::vector<int> static_features = {0}) {
    EventSequence seq;
    seq.subject_id = "toy";
    seq.static_features = std::move(static_features);
    for (std::size_t i = 0; i < times.size(); ++i) {
        Event e;
        e.time = times[i];
        e.state = 1 + static_cast<int>(i) % states;
        e.duration = i == 0 ? kNullDuration : 1 + static_cast<int>(i) % durations;
        e.features = {static_cast<int>(i) % dynamic_dim};
        seq.events.push_back(std::move(e));
    }
    seq.window_end = times.empty() ? 1.0 : times.back() + 1.0;
    return seq;
}

}  // namespace mcpflow::testing
