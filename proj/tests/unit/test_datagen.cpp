#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <omp.h>

#include "mcpflow/datagen.hpp"
#include "mcpflow/error.hpp"
#include "mcpflow/io.hpp"

using namespace mcpflow;

namespace {

bool within_three_sigma(std::size_t hits, std::size_t n, double p) {
    const double expected = static_cast<double>(n) * p;
    return std::abs(static_cast<double>(hits) - expected) <=
           3.0 * std::sqrt(static_cast<double>(n) * p * (1.0 - p));
}

}  // namespace

TEST_CASE("zero planted model gives uniform states") {
    GeneratorConfig cfg;
    cfg.labels = {4, 4};
    cfg.layout = {3, 6};
    cfg.planted = ParameterMatrix(cfg.layout.total(), cfg.labels);
    cfg.num_subjects = 1000;
    cfg.seed = 9;
    const auto data = generate(cfg);
    std::vector<std::size_t> counts(4, 0);
    std::size_t events = 0;
    for (const auto& seq : data.sequences)
        for (const auto& e : seq.events) {
            ++counts[static_cast<std::size_t>(e.state - 1)];
            ++events;
        }
    REQUIRE(events >= 10000);
    for (std::size_t c : counts) CHECK(within_three_sigma(c, events, 0.25));
}

TEST_CASE("a saturated logit fixes the state") {
    GeneratorConfig cfg;
    cfg.labels = {4, 3};
    cfg.layout = {2, 4};
    cfg.profile_template = {1.0, 0.0};
    ParameterMatrix planted(cfg.layout.total(), cfg.labels);
    planted.values(0, 2) = 50.0;
    cfg.planted = planted;
    cfg.num_subjects = 50;
    const auto data = generate(cfg);
    for (const auto& seq : data.sequences)
        for (const auto& e : seq.events) CHECK(e.state == 3);
}

TEST_CASE("generated sequences are valid and reproducible") {
    GeneratorConfig cfg;
    cfg.num_subjects = 120;
    cfg.seed = 31;
    omp_set_num_threads(1);
    const auto a = generate(cfg);
    omp_set_num_threads(4);
    const auto b = generate(cfg);
    omp_set_num_threads(omp_get_num_procs());
    CHECK(dataset_to_string(a.sequences) == dataset_to_string(b.sequences));
    CHECK(a.planted == b.planted);
    for (const auto& seq : a.sequences) {
        CHECK_NOTHROW(validate(seq, cfg.layout, cfg.labels));
        CHECK(seq.events.front().time == cfg.first_event_time);
        CHECK(seq.window_end == cfg.window_days);
    }
    cfg.seed = 32;
    CHECK(dataset_to_string(generate(cfg).sequences) != dataset_to_string(a.sequences));
}

TEST_CASE("planted recipe controls row sparsity") {
    GeneratorConfig cfg;
    cfg.layout = {20, 80};
    cfg.seed = 4;
    const auto theta = draw_planted(cfg);
    int active = 0;
    for (int m = 0; m < theta.rows(); ++m) {
        const double n = theta.values.row(m).norm();
        if (n == 0.0) continue;
        ++active;
        CHECK(theta.values.row(m).cwiseAbs().minCoeff() >= cfg.recipe.magnitude_lo);
        CHECK(theta.values.row(m).cwiseAbs().maxCoeff() <= cfg.recipe.magnitude_hi);
    }
    CHECK(within_three_sigma(static_cast<std::size_t>(active), 100, cfg.recipe.row_density));
}

TEST_CASE("imbalance profile frequencies are realised") {
    GeneratorConfig cfg;
    cfg.labels = {2, 2};
    cfg.layout = {2, 6};
    cfg.imbalance_profile = {0.6, 0.25, 0.1, 0.05};
    cfg.num_subjects = 800;
    cfg.seed = 12;
    const auto data = generate(cfg);
    std::vector<std::size_t> counts(4, 0);
    std::size_t n = 0;
    for (const auto& seq : data.sequences)
        for (const auto& e : seq.events) {
            if (e.duration == kNullDuration) continue;
            ++counts[static_cast<std::size_t>((e.state - 1) * 2 + e.duration - 1)];
            ++n;
        }
    for (std::size_t k = 0; k < 4; ++k) CHECK(within_three_sigma(counts[k], n, cfg.imbalance_profile[k]));
}

TEST_CASE("configuration errors") {
    GeneratorConfig cfg;
    cfg.planted = ParameterMatrix(3, cfg.labels);
    CHECK_THROWS_AS(generate(cfg), InvalidArgument);

    cfg = {};
    cfg.profile_template = {0.5};
    CHECK_THROWS_AS(generate(cfg), InvalidArgument);

    cfg = {};
    cfg.imbalance_profile = {0.5, 0.5};
    CHECK_THROWS_AS(generate(cfg), InvalidArgument);

    cfg = {};
    cfg.imbalance_profile.assign(16, 0.1);
    CHECK_THROWS_AS(generate(cfg), InvalidArgument);

    cfg = {};
    cfg.first_event_time = 0.0;
    CHECK_THROWS_AS(generate(cfg), InvalidArgument);
}
