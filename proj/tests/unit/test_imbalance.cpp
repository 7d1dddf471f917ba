#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mcpflow/error.hpp"
#include "mcpflow/imbalance.hpp"

using namespace mcpflow;
using doctest::Approx;

namespace {

const FeatureLayout kLayout{2, 4};
const KernelConfig kKernel{KernelVariant::MCP, 2.0};

// Three-event record whose only training sample sits at t = 3 with the
// second event's bits; the first event carries no features.
EventSequence subject(int state, int duration, std::vector<int> statics, std::vector<int> bits) {
    EventSequence seq;
    seq.subject_id = "s";
    seq.static_features = std::move(statics);
    seq.events = {Event{1.0, 1, kNullDuration, {}}, Event{3.0, 1, 2, std::move(bits)},
                  Event{5.0, state, duration, {}}};
    seq.window_end = 6.0;
    seq.synthetic = true;
    return seq;
}

std::vector<TrainSample> samples_of(const std::vector<EventSequence>& seqs) {
    return build_training_samples(seqs, kKernel, kLayout);
}

std::map<ClassKey, std::size_t> joint_counts(const std::vector<TrainSample>& s) {
    return ClassCounts::of(s).joint;
}

}  // namespace

TEST_CASE("sample weights") {
    CHECK(weight_for_count(std::exp(1.0) - 1.0) == Approx(1.0).epsilon(1e-14));
    CHECK(weight_for_count(1.0) == Approx(1.44269504).epsilon(1e-8));
    CHECK_THROWS_AS(weight_for_count(0.0), InvalidArgument);

    std::vector<EventSequence> balanced;
    for (int c = 1; c <= 2; ++c)
        for (int d = 1; d <= 2; ++d)
            for (int k = 0; k < 3; ++k) balanced.push_back(subject(c, d, {}, {0}));
    const auto s = samples_of(balanced);
    const auto w = sample_weights(s);
    for (double x : w) CHECK(x == w.front());

    std::vector<EventSequence> skewed{subject(1, 1, {}, {}), subject(1, 1, {}, {}), subject(2, 1, {}, {})};
    const auto sk = samples_of(skewed);
    const auto weighted = apply_weights(sk);
    CHECK(weighted.size() == sk.size());
    CHECK(weighted[0].weight == Approx(1.0 / std::log(3.0)));
    CHECK(weighted[2].weight == Approx(1.0 / std::log(2.0)));
    CHECK(weighted[0].feature == sk[0].feature);
}

TEST_CASE("null durations are counted under their own key") {
    TrainSample a, b;
    a.state = 1;
    b.state = 1;
    b.duration = 2;
    const std::vector<TrainSample> s{a, b, b};
    const auto counts = ClassCounts::of(s);
    CHECK(counts.joint.at({1, kNullDuration}) == 1);
    CHECK(counts.joint.at({1, 2}) == 2);
    CHECK(counts.state_totals.at(1) == 3);
    const auto w = sample_weights(s);
    CHECK(w[0] == Approx(1.0 / std::log(2.0)));
}

TEST_CASE("balanced input passes through") {
    std::vector<EventSequence> seqs{subject(1, 1, {0}, {1}), subject(2, 2, {1}, {2})};
    const auto s = samples_of(seqs);
    const auto out = synthesize_balanced(s, kKernel, kLayout, 3);
    REQUIRE(out.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(out[i].feature == s[i].feature);
        CHECK(out[i].state == s[i].state);
        CHECK(out[i].duration == s[i].duration);
        CHECK(out[i].synthetic == s[i].synthetic);
    }
}

TEST_CASE("identical members synthesize clones without smoothing") {
    std::vector<EventSequence> seqs;
    for (int k = 0; k < 5; ++k) seqs.push_back(subject(1, 1, {0}, {1, 3}));
    for (int k = 0; k < 2; ++k) seqs.push_back(subject(2, 2, {1}, {0, 2}));
    const auto s = samples_of(seqs);
    SynthesisOptions options;
    options.smoothing = false;
    const auto out = synthesize_balanced(s, kKernel, kLayout, 5, options);
    REQUIRE(out.size() == 10);
    for (std::size_t i = 7; i < out.size(); ++i) {
        CHECK(out[i].state == 2);
        CHECK(out[i].feature == s[5].feature);
    }
}

TEST_CASE("synthesized bit frequency follows the class") {
    std::vector<TrainSample> s;
    auto make = [](int state, std::vector<int> bits) {
        TrainSample t;
        t.state = state;
        t.duration = 1;
        t.feature = Eigen::VectorXd::Zero(kLayout.total());
        t.raw.event_features = std::move(bits);
        t.raw.eval_time = 4.0;
        t.raw.elapsed = 1.0;
        return t;
    };
    for (int k = 0; k < 10004; ++k) s.push_back(make(1, {}));
    s.push_back(make(2, {0}));
    s.push_back(make(2, {0}));
    s.push_back(make(2, {0, 2}));
    s.push_back(make(2, {}));
    SynthesisOptions options;
    options.smoothing = false;
    const auto out = synthesize_balanced(s, kKernel, kLayout, 17, options);
    std::size_t hits = 0, made = 0;
    for (const auto& t : out) {
        if (!t.synthetic) continue;
        ++made;
        hits += std::find(t.raw.event_features.begin(), t.raw.event_features.end(), 0) !=
                t.raw.event_features.end();
    }
    CHECK(made == 10000);
    const double freq = static_cast<double>(hits) / static_cast<double>(made);
    CHECK(freq >= 0.73);
    CHECK(freq <= 0.77);
}

TEST_CASE("synthesis invariants") {
    Rng rng(21);
    std::vector<EventSequence> seqs;
    for (int k = 0; k < 60; ++k) {
        const int c = 1 + static_cast<int>(rng.below(3)), d = 1 + static_cast<int>(rng.below(2));
        std::vector<int> statics, bits;
        for (int m = 0; m < 2; ++m)
            if (rng.bernoulli(0.5)) statics.push_back(m);
        for (int m = 0; m < 4; ++m)
            if (rng.bernoulli(0.3 * c)) bits.push_back(m);
        seqs.push_back(subject(c == 3 && k % 4 ? 1 : c, d, statics, bits));
    }
    const auto s = samples_of(seqs);
    const auto out = synthesize_balanced(s, kKernel, kLayout, 99);

    const auto counts = joint_counts(out);
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& [key, n] : counts) lo = std::min(lo, n), hi = std::max(hi, n);
    CHECK(lo == hi);
    CHECK(counts.size() == joint_counts(s).size());

    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(out[i].feature == s[i].feature);
        CHECK(out[i].state == s[i].state);
        CHECK(out[i].synthetic == s[i].synthetic);
    }
    for (std::size_t i = s.size(); i < out.size(); ++i) {
        for (int b : out[i].raw.event_features) CHECK((b >= 0 && b < kLayout.dynamic_dim));
        for (int b : out[i].raw.static_features) CHECK((b >= 0 && b < kLayout.profile_dim));
    }

    const auto again = synthesize_balanced(s, kKernel, kLayout, 99);
    REQUIRE(again.size() == out.size());
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(again[i].feature == out[i].feature);
}

TEST_CASE("marginal balancing") {
    std::vector<EventSequence> seqs;
    for (int k = 0; k < 6; ++k) seqs.push_back(subject(1, 1 + k % 2, {}, {0}));
    for (int k = 0; k < 2; ++k) seqs.push_back(subject(2, 1, {}, {1}));
    const auto s = samples_of(seqs);
    SynthesisOptions options;
    options.key = BalanceKey::State;
    const auto out = synthesize_balanced(s, kKernel, kLayout, 1, options);
    const auto counts = ClassCounts::of(out);
    CHECK(counts.state_totals.at(1) == 6);
    CHECK(counts.state_totals.at(2) == 6);
    for (const auto& t : out) CHECK(t.duration != kNullDuration);
}

TEST_CASE("missing class is reported when all are required") {
    std::vector<EventSequence> seqs{subject(1, 1, {}, {0}), subject(2, 2, {}, {1})};
    const auto s = samples_of(seqs);
    SynthesisOptions options;
    options.require_all = LabelSpace{2, 2};
    CHECK_THROWS_WITH_AS(synthesize_balanced(s, kKernel, kLayout, 1, options),
                         doctest::Contains("(1, 2)"), InvalidArgument);
}
