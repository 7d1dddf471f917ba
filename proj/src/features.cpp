#include "mcpflow/features.hpp"

#include <string>

#include "mcpflow/error.hpp"

namespace mcpflow {

namespace {

void check_index(int idx, int dim) {
    if (idx < 0 || idx >= dim)
        throw InvalidArgument("build_feature: feature index " + std::to_string(idx) +
                              " outside block of size " + std::to_string(dim));
}

}  // namespace

double last_event_before(const EventSequence& seq, std::size_t history_len, double t) {
    double last = 0.0;
    for (std::size_t i = 0; i < history_len; ++i) {
        if (seq.events[i].time < t) last = seq.events[i].time;
    }
    return last;
}

FeatureVector build_feature(const EventSequence& seq, std::size_t history_len, double t,
                            const KernelConfig& config, const FeatureLayout& layout) {
    config.validate();
    if (history_len > seq.events.size())
        throw InvalidArgument("build_feature: history_len " + std::to_string(history_len) +
                              " exceeds " + std::to_string(seq.events.size()) + " events");
    if (history_len > 0 && t < seq.events[history_len - 1].time)
        throw InvalidArgument("build_feature: t precedes the last history event");
    if (t < 0.0) throw InvalidArgument("build_feature: negative time");

    FeatureVector f = FeatureVector::Zero(layout.total());

    const double g = time_scale(t, last_event_before(seq, history_len, t), config);
    for (int idx : seq.static_features) {
        check_index(idx, layout.profile_dim);
        f[idx] = g;
    }

    auto dynamic = f.segment(layout.profile_dim, layout.dynamic_dim);
    if (config.variant == KernelVariant::LR) {
        if (history_len > 0)
            for (int idx : seq.events[history_len - 1].features) {
                check_index(idx, layout.dynamic_dim);
                dynamic[idx] += 1.0;
            }
        return f;
    }
    for (std::size_t i = 0; i < history_len; ++i) {
        const Event& e = seq.events[i];
        const double h = kernel_weight(t, e.time, config);
        for (int idx : e.features) {
            check_index(idx, layout.dynamic_dim);
            dynamic[idx] += h;
        }
    }
    return f;
}

}  // namespace mcpflow
