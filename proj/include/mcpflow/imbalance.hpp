#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mcpflow/kernel.hpp"
#include "mcpflow/samples.hpp"

namespace mcpflow {

// Key used for class accounting. Joint is (state, duration); the marginal
// modes put kNullDuration / 0 in the unused slot.
enum class BalanceKey { Joint, State, Duration };

using ClassKey = std::pair<int, int>;

struct ClassCounts {
    std::map<ClassKey, std::size_t> joint;
    std::map<int, std::size_t> state_totals;
    std::map<int, std::size_t> duration_totals;

    static ClassCounts of(std::span<const TrainSample> samples);
};

ClassKey class_key(const TrainSample& sample, BalanceKey mode);

// 1 / ln(1 + n)
double weight_for_count(double n);

// w_i = 1 / ln(1 + #{(c_i, d_i)}); null durations count under (c, null).
std::vector<double> sample_weights(std::span<const TrainSample> samples);

// Copy of samples with weights set by sample_weights.
std::vector<TrainSample> apply_weights(std::span<const TrainSample> samples);

struct SynthesisOptions {
    BalanceKey key = BalanceKey::Joint;
    // Bernoulli probabilities use (k + 1) / (n + 2) instead of k / n.
    bool smoothing = true;
    // When set, every class of this label space must be present; otherwise
    // only the classes that occur are balanced.
    std::optional<LabelSpace> require_all;
};

// Tops every class up to the size of the largest one with samples whose raw
// binary features are drawn dimension-wise from the class's empirical
// frequencies, then composed through build_feature at the class's mean
// evaluation and elapsed times. Originals come first, unchanged; synthesized
// samples follow grouped by class in key order.
std::vector<TrainSample> synthesize_balanced(std::span<const TrainSample> samples,
                                             const KernelConfig& kernel,
                                             const FeatureLayout& layout, std::uint64_t seed,
                                             const SynthesisOptions& options = {});

}  // namespace mcpflow
