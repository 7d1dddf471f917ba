#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mcpflow {

// Duration label of an event that has no preceding stay (the first event).
inline constexpr int kNullDuration = 0;

// Sizes of the two feature blocks: the static profile block and the dynamic
// (treatment + medication + nursing) per-event block.
struct FeatureLayout {
    int profile_dim = 0;
    int dynamic_dim = 0;

    int total() const noexcept { return profile_dim + dynamic_dim; }
    bool operator==(const FeatureLayout&) const = default;
};

// Catalog sizes for the two label heads.
struct LabelSpace {
    int states = 0;
    int durations = 0;

    int heads() const noexcept { return states + durations; }
    bool operator==(const LabelSpace&) const = default;
};

struct Event {
    double time = 0.0;                  // days since sequence origin
    int state = 1;                      // 1..C
    int duration = kNullDuration;       // 1..D, or kNullDuration
    std::vector<int> features;          // active dynamic-block indices, 0-based
};

// One subject's flow. Binary features are kept sparse as sorted index lists.
struct EventSequence {
    std::string subject_id;
    std::vector<int> static_features;   // active profile-block indices, 0-based
    std::vector<Event> events;
    double window_end = 0.0;
    // Record produced by the synthetic oversampler; only its final event
    // yields a training sample.
    bool synthetic = false;

    std::size_t size() const noexcept { return events.size(); }
};

// Throws InvalidArgument describing the first violated invariant.
void validate(const EventSequence& seq, const FeatureLayout& layout, const LabelSpace& labels);

// Whole days for a dwell time: ceil, clamped to [1, max_bucket].
int duration_bucket(double days, int max_bucket);

// Days represented by a bucket when rolling a trajectory forward. The last
// bucket is open-ended ("more than D-1 days") and maps to D days.
inline double bucket_days(int bucket) { return static_cast<double>(bucket); }

// Events with time <= cutoff, window_end set to cutoff.
EventSequence truncate(const EventSequence& seq, double cutoff);

}  // namespace mcpflow
