#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mcpflow/kernel.hpp"
#include "mcpflow/parameter_matrix.hpp"
#include "mcpflow/sequence.hpp"

namespace mcpflow {

// Recipe for a row-sparse planted Theta*: each row is active with
// probability row_density, active entries are +-U(magnitude_lo, magnitude_hi).
struct PlantedRecipe {
    double row_density = 0.3;
    double magnitude_lo = 1.0;
    double magnitude_hi = 3.0;
};

struct GeneratorConfig {
    int num_subjects = 100;
    LabelSpace labels{4, 4};
    FeatureLayout layout{10, 30};
    KernelConfig kernel{KernelVariant::MCP, 3.0};

    // Used as-is when set, otherwise drawn from recipe.
    std::optional<ParameterMatrix> planted;
    PlantedRecipe recipe;

    // Bernoulli probability per profile dimension. Empty: 0.3 everywhere.
    std::vector<double> profile_template;
    // Per state (C rows), Bernoulli probability per dynamic dimension of the
    // raw features of an event in that state. Empty: each state owns a
    // contiguous slice at 0.6, 0.05 elsewhere.
    std::vector<std::vector<double>> state_templates;

    // Target joint (c, d) frequencies, row-major over c then d. When set,
    // labels are drawn from this profile instead of the planted model, and
    // each event additionally carries cue features of the label that follows
    // it (cue_templates, one row per joint class).
    std::vector<double> imbalance_profile;
    std::vector<std::vector<double>> cue_templates;

    double window_days = 30.0;
    double first_event_time = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GeneratedData {
    std::vector<EventSequence> sequences;
    ParameterMatrix planted;
    GeneratorConfig config;  // with defaults resolved
};

GeneratorConfig resolve_defaults(const GeneratorConfig& config);
ParameterMatrix draw_planted(const GeneratorConfig& config);

GeneratedData generate(const GeneratorConfig& config);

}  // namespace mcpflow
