#include "mcpflow/samples.hpp"

#include <exception>

#include "mcpflow/error.hpp"

namespace mcpflow {

namespace {

std::vector<TrainSample> samples_of(const EventSequence& seq, const KernelConfig& kernel,
                                    const FeatureLayout& layout) {
    std::vector<TrainSample> out;
    if (seq.events.size() < 2) return out;
    const std::size_t first = seq.synthetic ? seq.events.size() - 1 : 1;
    out.reserve(seq.events.size() - first);
    for (std::size_t i = first; i < seq.events.size(); ++i) {
        const Event& current = seq.events[i - 1];
        const Event& next = seq.events[i];
        TrainSample s;
        s.feature = build_feature(seq, i, current.time, kernel, layout);
        s.state = next.state;
        s.duration = next.duration;
        s.synthetic = seq.synthetic;
        s.raw.static_features = seq.static_features;
        s.raw.event_features = current.features;
        s.raw.eval_time = current.time;
        s.raw.elapsed = current.time - last_event_before(seq, i, current.time);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<TrainSample> build_training_samples(std::span<const EventSequence> sequences,
                                                const KernelConfig& kernel,
                                                const FeatureLayout& layout) {
    kernel.validate();
    const auto n = static_cast<std::ptrdiff_t>(sequences.size());
    std::vector<std::vector<TrainSample>> per_sequence(sequences.size());
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t u = 0; u < n; ++u) {
        try {
            per_sequence[u] = samples_of(sequences[u], kernel, layout);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<TrainSample> out;
    for (auto& chunk : per_sequence)
        for (auto& s : chunk) out.push_back(std::move(s));
    return out;
}

double mean_dwell_days(std::span<const EventSequence> sequences) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& seq : sequences) {
        for (std::size_t i = 1; i < seq.events.size(); ++i) {
            total += seq.events[i].time - seq.events[i - 1].time;
            ++count;
        }
    }
    if (count == 0) throw InvalidArgument("mean_dwell_days: no transitions in the data");
    return total / static_cast<double>(count);
}

}  // namespace mcpflow
