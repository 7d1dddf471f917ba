#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mcpflow/catalog.hpp"
#include "mcpflow/error.hpp"
#include "mcpflow/features.hpp"
#include "mcpflow/kernel.hpp"
#include "mcpflow/samples.hpp"
#include "mcpflow/sequence.hpp"

using namespace mcpflow;
using doctest::Approx;

namespace {

const KernelConfig kMcp1{KernelVariant::MCP, 1.0};

EventSequence one_event(double time, std::vector<int> features, std::vector<int> statics = {}) {
    EventSequence seq;
    seq.subject_id = "s";
    seq.static_features = std::move(statics);
    seq.events.push_back(Event{time, 1, kNullDuration, std::move(features)});
    seq.window_end = time + 10.0;
    return seq;
}

}  // namespace

TEST_CASE("kernel weight") {
    CHECK(kernel_weight(4.0, 4.0, {KernelVariant::MCP, 0.3}) == 1.0);
    CHECK(kernel_weight(4.0, 4.0, {KernelVariant::MCP, 12.0}) == 1.0);
    CHECK(kernel_weight(9.0, 1.5, {KernelVariant::SCP, 1.0}) == 1.0);
    CHECK(kernel_weight(100.0, 0.0, {KernelVariant::SCP, 1.0}) == 1.0);
    CHECK(kernel_weight(5.0, 3.0, {KernelVariant::MCP, 2.0}) == Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(kernel_weight(5.0, 3.0, {KernelVariant::MCP, 2.0}) == Approx(0.36787944).epsilon(1e-8));
    CHECK(kernel_weight(5.0, 3.0, {KernelVariant::MPP, 1.0}) == 1.0);

    CHECK_THROWS_AS(kernel_weight(1.0, 2.0, kMcp1), InvalidArgument);
    CHECK_THROWS_AS(kernel_weight(3.0, 2.0, {KernelVariant::MCP, -1.0}), InvalidArgument);
    CHECK_THROWS_AS(kernel_weight(3.0, 2.0, {KernelVariant::MCP, 0.0}), InvalidArgument);
}

TEST_CASE("time scale") {
    CHECK(time_scale(3.0, 3.0, kMcp1) == 0.0);
    CHECK(time_scale(17.5, 2.0, {KernelVariant::MPP, 1.0}) == 1.0);
    CHECK(time_scale(17.5, 2.0, {KernelVariant::LR, 1.0}) == 1.0);
    CHECK(time_scale(5.0, 2.0, kMcp1) == 3.0);
    CHECK(time_scale(5.0, 2.0, {KernelVariant::SCP, 1.0}) == 5.0);
    CHECK_THROWS_AS(time_scale(1.0, 2.0, kMcp1), InvalidArgument);
}

TEST_CASE("kernel variant names round trip") {
    for (auto v : {KernelVariant::MCP, KernelVariant::SCP, KernelVariant::MPP, KernelVariant::LR})
        CHECK(parse_kernel_variant(to_string(v)) == v);
    CHECK_THROWS_AS(parse_kernel_variant("hawkes"), InvalidArgument);
}

TEST_CASE("build_feature examples") {
    const FeatureLayout layout{2, 3};

    SUBCASE("empty history") {
        EventSequence seq = one_event(5.0, {1}, {0});
        const auto f = build_feature(seq, 0, 2.0, kMcp1, layout);
        CHECK(f(0) == 2.0);
        CHECK(f(1) == 0.0);
        CHECK(f.tail(3).isZero());
    }
    SUBCASE("event at t enters with weight one") {
        EventSequence seq = one_event(4.0, {1, 2});
        const auto f = build_feature(seq, 1, 4.0, kMcp1, layout);
        CHECK(f(2) == 0.0);
        CHECK(f(3) == 1.0);
        CHECK(f(4) == 1.0);
    }
    SUBCASE("one day lag, sigma one") {
        EventSequence seq = one_event(4.0, {0});
        const auto f = build_feature(seq, 1, 5.0, kMcp1, layout);
        CHECK(f(2) == Approx(0.36787944).epsilon(1e-8));
        CHECK(f(3) == 0.0);
    }
    SUBCASE("reference time is the last event strictly before t") {
        EventSequence seq = one_event(2.0, {}, {1});
        seq.events.push_back(Event{6.0, 2, 4, {}});
        CHECK(build_feature(seq, 2, 6.0, kMcp1, layout)(1) == 4.0);
        CHECK(build_feature(seq, 2, 9.0, kMcp1, layout)(1) == 3.0);
    }
    SUBCASE("errors") {
        EventSequence seq = one_event(4.0, {0});
        CHECK_THROWS_AS(build_feature(seq, 2, 5.0, kMcp1, layout), InvalidArgument);
        CHECK_THROWS_AS(build_feature(seq, 1, 3.0, kMcp1, layout), InvalidArgument);
        seq.events[0].features = {7};
        CHECK_THROWS_AS(build_feature(seq, 1, 5.0, kMcp1, layout), InvalidArgument);
    }
}

TEST_CASE("build_feature properties") {
    const FeatureLayout layout{2, 4};
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto seq = testing::toy_sequence({1.0, 2.5, 4.0, 7.0}, 3, 3, 4, {0, 1});
        const double t = 7.0 + rng.uniform(0.0, 5.0);

        SUBCASE("linear in each event's features") {
            EventSequence none = seq, a = seq, b = seq, ab = seq;
            none.events[1].features = {};
            a.events[1].features = {0};
            b.events[1].features = {2};
            ab.events[1].features = {0, 2};
            const auto f0 = build_feature(none, 4, t, kMcp1, layout);
            const auto fa = build_feature(a, 4, t, kMcp1, layout);
            const auto fb = build_feature(b, 4, t, kMcp1, layout);
            const auto fab = build_feature(ab, 4, t, kMcp1, layout);
            CHECK(((fab - f0) - (fa - f0) - (fb - f0)).norm() == Approx(0.0).epsilon(1e-12));
        }
        SUBCASE("monotone in sigma") {
            const double s1 = rng.uniform(0.1, 3.0), s2 = s1 + rng.uniform(0.0, 3.0);
            const auto f1 = build_feature(seq, 4, t, {KernelVariant::MCP, s1}, layout);
            const auto f2 = build_feature(seq, 4, t, {KernelVariant::MCP, s2}, layout);
            CHECK(((f2 - f1).tail(4).array() >= 0.0).all());
        }
        SUBCASE("self-correcting history block sums the features") {
            const auto f = build_feature(seq, 4, 1e6, {KernelVariant::SCP, 1.0}, layout);
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
            for (const auto& e : seq.events)
                for (int idx : e.features) sum(idx) += 1.0;
            CHECK((f.tail(4) - sum).norm() == 0.0);
        }
        SUBCASE("LR block is the latest event") {
            const auto f = build_feature(seq, 3, rng.uniform(4.0, 7.0), {KernelVariant::LR, 1.0}, layout);
            CHECK(f(0) == 1.0);
            CHECK(f(1) == 1.0);
            Eigen::VectorXd expect = Eigen::VectorXd::Zero(4);
            for (int idx : seq.events[2].features) expect(idx) = 1.0;
            CHECK(f.tail(4) == expect);
        }
    }
}

TEST_CASE("sequence validation") {
    const FeatureLayout layout{2, 3};
    const LabelSpace labels{3, 3};
    auto good = testing::toy_sequence({1.0, 2.0, 3.5}, 3, 3, 3, {1});
    CHECK_NOTHROW(validate(good, layout, labels));

    auto bad = good;
    bad.events[1].time = 1.0;
    CHECK_THROWS_AS(validate(bad, layout, labels), InvalidArgument);
    bad = good;
    bad.events[0].time = 0.0;
    CHECK_THROWS_AS(validate(bad, layout, labels), InvalidArgument);
    bad = good;
    bad.window_end = 3.0;
    CHECK_THROWS_AS(validate(bad, layout, labels), InvalidArgument);
    bad = good;
    bad.events[0].duration = 1;
    CHECK_THROWS_AS(validate(bad, layout, labels), InvalidArgument);
    bad = good;
    bad.events[2].duration = kNullDuration;
    CHECK_THROWS_AS(validate(bad, layout, labels), InvalidArgument);
    bad = good;
    bad.events[2].state = 4;
    CHECK_THROWS_AS(validate(bad, layout, labels), InvalidArgument);
    bad = good;
    bad.static_features = {2};
    CHECK_THROWS_AS(validate(bad, layout, labels), InvalidArgument);
}

TEST_CASE("duration buckets and truncation") {
    CHECK(duration_bucket(0.2, 8) == 1);
    CHECK(duration_bucket(1.0, 8) == 1);
    CHECK(duration_bucket(1.5, 8) == 2);
    CHECK(duration_bucket(30.0, 8) == 8);
    const auto seq = testing::toy_sequence({1.0, 2.0, 3.5, 6.0}, 3, 3, 3);
    const auto cut = truncate(seq, 3.5);
    CHECK(cut.size() == 3);
    CHECK(cut.window_end == 3.5);
}

TEST_CASE("training samples pair the previous event's feature with the next labels") {
    const FeatureLayout layout{1, 3};
    const auto seq = testing::toy_sequence({1.0, 3.0, 4.0}, 3, 3, 3, {0});
    const std::vector<EventSequence> seqs{seq};
    const auto samples = build_training_samples(seqs, kMcp1, layout);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].state == seq.events[1].state);
    CHECK(samples[0].duration == seq.events[1].duration);
    CHECK(samples[0].feature == build_feature(seq, 1, 1.0, kMcp1, layout));
    CHECK(samples[1].feature == build_feature(seq, 2, 3.0, kMcp1, layout));
    CHECK(mean_dwell_days(seqs) == 1.5);
}

TEST_CASE("mean dwell of durations two and four is three") {
    std::vector<EventSequence> seqs{testing::toy_sequence({1.0, 3.0, 7.0, 9.0, 13.0}, 2, 4, 2)};
    CHECK(mean_dwell_days(seqs) == 3.0);
    std::vector<EventSequence> lone{testing::toy_sequence({1.0}, 2, 2, 2)};
    CHECK_THROWS_AS(mean_dwell_days(lone), InvalidArgument);
}

TEST_CASE("catalog") {
    auto cat = Catalog::synthetic({2, 3}, {2, 3});
    CHECK(cat.layout() == FeatureLayout{2, 3});
    CHECK(cat.labels() == LabelSpace{2, 3});
    CHECK(cat.durations.back() == "d>2");
    cat.build_index();
    CHECK(cat.profile_index("p1") == 1);
    CHECK(!cat.profile_index("zz").has_value());

    auto other = cat;
    other.states[0] = "ICU";
    CHECK(other.hash() != cat.hash());
    CHECK(cat.hash_hex().size() == 16);
    // Published FNV-1a test vectors.
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
