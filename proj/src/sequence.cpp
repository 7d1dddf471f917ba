#include "mcpflow/sequence.hpp"

#include <cmath>
#include <sstream>

#include "mcpflow/error.hpp"

namespace mcpflow {

namespace {

void check_indices(const std::vector<int>& indices, int dim, const std::string& where) {
    for (int idx : indices) {
        if (idx < 0 || idx >= dim) {
            std::ostringstream msg;
            msg << where << ": feature index " << idx << " outside [0, " << dim << ")";
            throw InvalidArgument(msg.str());
        }
    }
}

}  // namespace

void validate(const EventSequence& seq, const FeatureLayout& layout, const LabelSpace& labels) {
    const std::string who = "sequence '" + seq.subject_id + "'";
    if (!std::isfinite(seq.window_end)) throw InvalidArgument(who + ": window_end is not finite");
    check_indices(seq.static_features, layout.profile_dim, who + " static block");

    double prev = 0.0;
    for (std::size_t i = 0; i < seq.events.size(); ++i) {
        const Event& e = seq.events[i];
        const std::string at = who + " event " + std::to_string(i + 1);
        if (!(e.time > prev) || !std::isfinite(e.time))
            throw InvalidArgument(at + ": times must be strictly increasing and positive");
        if (e.time > seq.window_end) throw InvalidArgument(at + ": time after window_end");
        if (e.state < 1 || e.state > labels.states)
            throw InvalidArgument(at + ": state label " + std::to_string(e.state) + " out of range");
        if (i == 0) {
            if (e.duration != kNullDuration)
                throw InvalidArgument(at + ": first event must carry the null duration");
        } else if (e.duration < 1 || e.duration > labels.durations) {
            throw InvalidArgument(at + ": duration label " + std::to_string(e.duration) +
                                  " out of range");
        }
        check_indices(e.features, layout.dynamic_dim, at);
        prev = e.time;
    }
}

int duration_bucket(double days, int max_bucket) {
    if (max_bucket < 1) throw InvalidArgument("duration_bucket: need at least one bucket");
    const double whole = std::ceil(days);
    if (whole <= 1.0) return 1;
    if (whole >= max_bucket) return max_bucket;
    return static_cast<int>(whole);
}

EventSequence truncate(const EventSequence& seq, double cutoff) {
    EventSequence out;
    out.subject_id = seq.subject_id;
    out.static_features = seq.static_features;
    out.synthetic = seq.synthetic;
    out.window_end = cutoff;
    for (const Event& e : seq.events) {
        if (e.time > cutoff) break;
        out.events.push_back(e);
    }
    return out;
}

}  // namespace mcpflow
