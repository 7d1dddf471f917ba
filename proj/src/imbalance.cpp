#include "mcpflow/imbalance.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "mcpflow/error.hpp"
#include "mcpflow/random.hpp"

namespace mcpflow {

ClassCounts ClassCounts::of(std::span<const TrainSample> samples) {
    ClassCounts counts;
    for (const auto& s : samples) {
        ++counts.joint[{s.state, s.duration}];
        ++counts.state_totals[s.state];
        ++counts.duration_totals[s.duration];
    }
    return counts;
}

ClassKey class_key(const TrainSample& sample, BalanceKey mode) {
    switch (mode) {
        case BalanceKey::Joint: return {sample.state, sample.duration};
        case BalanceKey::State: return {sample.state, kNullDuration};
        case BalanceKey::Duration: return {0, sample.duration};
    }
    return {sample.state, sample.duration};
}

double weight_for_count(double n) {
    if (!(n > 0.0)) throw InvalidArgument("weight_for_count: count must be positive");
    return 1.0 / std::log1p(n);
}

std::vector<double> sample_weights(std::span<const TrainSample> samples) {
    if (samples.empty()) throw InvalidArgument("sample_weights: empty sample list");
    const ClassCounts counts = ClassCounts::of(samples);
    std::vector<double> weights;
    weights.reserve(samples.size());
    for (const auto& s : samples)
        weights.push_back(weight_for_count(static_cast<double>(counts.joint.at({s.state, s.duration}))));
    return weights;
}

std::vector<TrainSample> apply_weights(std::span<const TrainSample> samples) {
    const auto weights = sample_weights(samples);
    std::vector<TrainSample> out(samples.begin(), samples.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i].weight = weights[i];
    return out;
}

namespace {

std::string describe(const ClassKey& key) {
    return "(" + std::to_string(key.first) + ", " +
           (key.second == kNullDuration ? std::string("null") : std::to_string(key.second)) + ")";
}

std::vector<double> frequencies(const std::vector<const TrainSample*>& members, int dim,
                                bool static_block, bool smoothing) {
    std::vector<double> hits(static_cast<std::size_t>(dim), 0.0);
    for (const TrainSample* s : members) {
        const auto& bits = static_block ? s->raw.static_features : s->raw.event_features;
        for (int idx : bits) {
            if (idx < 0 || idx >= dim)
                throw InvalidArgument("synthesize_balanced: raw feature index out of range");
            hits[static_cast<std::size_t>(idx)] += 1.0;
        }
    }
    const double n = static_cast<double>(members.size());
    for (double& h : hits) h = smoothing ? (h + 1.0) / (n + 2.0) : h / n;
    return hits;
}

std::vector<int> draw_bits(const std::vector<double>& probs, Rng& rng) {
    std::vector<int> bits;
    for (std::size_t k = 0; k < probs.size(); ++k)
        if (rng.bernoulli(probs[k])) bits.push_back(static_cast<int>(k));
    return bits;
}

// Label for the slot the balancing key leaves open, drawn from the class's
// own empirical distribution.
int draw_member_label(const std::vector<const TrainSample*>& members, bool state, Rng& rng) {
    const TrainSample* pick = members[rng.below(members.size())];
    return state ? pick->state : pick->duration;
}

std::vector<TrainSample> synthesize_class(const ClassKey& key,
                                          const std::vector<const TrainSample*>& members,
                                          std::size_t needed, const KernelConfig& kernel,
                                          const FeatureLayout& layout, std::uint64_t seed,
                                          const SynthesisOptions& options) {
    Rng rng(derive_seed(seed, (static_cast<std::uint64_t>(key.first) << 32) ^
                                  static_cast<std::uint32_t>(key.second)));
    const auto static_p = frequencies(members, layout.profile_dim, true, options.smoothing);
    const auto event_p = frequencies(members, layout.dynamic_dim, false, options.smoothing);

    double eval_time = 0.0;
    double elapsed = 0.0;
    for (const TrainSample* s : members) {
        eval_time += s->raw.eval_time;
        elapsed += s->raw.elapsed;
    }
    eval_time /= static_cast<double>(members.size());
    elapsed /= static_cast<double>(members.size());

    std::vector<TrainSample> out;
    out.reserve(needed);
    for (std::size_t k = 0; k < needed; ++k) {
        TrainSample s;
        s.state = options.key == BalanceKey::Duration ? draw_member_label(members, true, rng) : key.first;
        s.duration =
            options.key == BalanceKey::State ? draw_member_label(members, false, rng) : key.second;
        s.synthetic = true;
        s.raw.static_features = draw_bits(static_p, rng);
        s.raw.event_features = draw_bits(event_p, rng);
        s.raw.eval_time = eval_time;
        s.raw.elapsed = elapsed;

        // A featureless anchor event fixes t_I so that g sees the mean
        // elapsed time; the synthesized event sits at the evaluation point.
        EventSequence seq;
        seq.static_features = s.raw.static_features;
        if (elapsed > 0.0 && elapsed < eval_time)
            seq.events.push_back(Event{eval_time - elapsed, 1, kNullDuration, {}});
        seq.events.push_back(Event{eval_time, 1, kNullDuration, s.raw.event_features});
        s.feature = build_feature(seq, seq.events.size(), eval_time, kernel, layout);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<TrainSample> synthesize_balanced(std::span<const TrainSample> samples,
                                             const KernelConfig& kernel,
                                             const FeatureLayout& layout, std::uint64_t seed,
                                             const SynthesisOptions& options) {
    kernel.validate();
    std::map<ClassKey, std::vector<const TrainSample*>> classes;
    for (const auto& s : samples) classes[class_key(s, options.key)].push_back(&s);

    if (options.require_all) {
        const LabelSpace& space = *options.require_all;
        auto require = [&](ClassKey key) {
            if (!classes.contains(key))
                throw InvalidArgument("synthesize_balanced: class " + describe(key) + " has no samples");
        };
        for (int c = 1; c <= space.states; ++c) {
            if (options.key == BalanceKey::State) {
                require({c, kNullDuration});
                continue;
            }
            if (options.key == BalanceKey::Duration) break;
            for (int d = 1; d <= space.durations; ++d) require({c, d});
        }
        if (options.key == BalanceKey::Duration)
            for (int d = 1; d <= space.durations; ++d) require({0, d});
    }

    std::vector<TrainSample> out(samples.begin(), samples.end());
    if (classes.empty()) return out;

    std::size_t target = 0;
    for (const auto& [key, members] : classes) target = std::max(target, members.size());

    std::vector<std::pair<ClassKey, const std::vector<const TrainSample*>*>> pending;
    for (const auto& [key, members] : classes)
        if (members.size() < target) pending.emplace_back(key, &members);

    std::vector<std::vector<TrainSample>> generated(pending.size());
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(pending.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        try {
            const auto& [key, members] = pending[k];
            generated[k] = synthesize_class(key, *members, target - members->size(), kernel, layout,
                                            seed, options);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (auto& chunk : generated)
        for (auto& s : chunk) out.push_back(std::move(s));
    return out;
}

}  // namespace mcpflow
