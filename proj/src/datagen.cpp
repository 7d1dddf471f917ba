#include "mcpflow/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

#include "mcpflow/error.hpp"
#include "mcpflow/features.hpp"
#include "mcpflow/objective.hpp"
#include "mcpflow/random.hpp"

namespace mcpflow {

namespace {

constexpr std::uint64_t kPlantedStream = 0x9a1d;
constexpr std::uint64_t kCueStream = 0xc0e5;

void check_probabilities(const std::vector<double>& p, std::size_t size, const std::string& what) {
    if (p.size() != size)
        throw InvalidArgument(what + ": expected " + std::to_string(size) + " entries, got " +
                              std::to_string(p.size()));
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(what + ": probability outside [0, 1]");
}

std::vector<int> draw_bits(const std::vector<double>& probs, Rng& rng) {
    std::vector<int> bits;
    for (std::size_t k = 0; k < probs.size(); ++k)
        if (rng.bernoulli(probs[k])) bits.push_back(static_cast<int>(k));
    return bits;
}

std::vector<int> merge_bits(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i] < b[j])) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j] < a[i]) {
            out.push_back(b[j++]);
        } else {
            out.push_back(a[i]);
            ++i;
            ++j;
        }
    }
    return out;
}

int draw_label(const Eigen::VectorXd& p, Rng& rng) {
    return static_cast<int>(rng.categorical(
               std::span<const double>(p.data(), static_cast<std::size_t>(p.size())))) +
           1;
}

EventSequence generate_subject(const GeneratorConfig& cfg, const ParameterMatrix& planted,
                               std::size_t index) {
    Rng rng(derive_seed(cfg.seed, index));
    const int C = cfg.labels.states;
    const int D = cfg.labels.durations;
    const bool profile_mode = !cfg.imbalance_profile.empty();

    char id[32];
    std::snprintf(id, sizeof id, "S%06zu", index + 1);
    EventSequence seq;
    seq.subject_id = id;
    seq.window_end = cfg.window_days;
    seq.static_features = draw_bits(cfg.profile_template, rng);

    int first_state = 0;
    if (profile_mode) {
        Eigen::VectorXd marginal = Eigen::VectorXd::Zero(C);
        for (int c = 0; c < C; ++c)
            for (int d = 0; d < D; ++d) marginal[c] += cfg.imbalance_profile[c * D + d];
        first_state = draw_label(marginal, rng);
    } else {
        const auto f = build_feature(seq, 0, cfg.first_event_time, cfg.kernel, cfg.layout);
        first_state = draw_label(class_probabilities(planted.state_block(), f), rng);
    }
    seq.events.push_back(Event{cfg.first_event_time, first_state, kNullDuration, {}});
    if (!profile_mode)
        seq.events.back().features = draw_bits(cfg.state_templates[first_state - 1], rng);

    while (true) {
        Event& current = seq.events.back();
        int next_state = 0;
        int next_duration = 0;
        if (profile_mode) {
            const auto joint = rng.categorical(cfg.imbalance_profile);
            next_state = static_cast<int>(joint) / D + 1;
            next_duration = static_cast<int>(joint) % D + 1;
            current.features = merge_bits(draw_bits(cfg.state_templates[current.state - 1], rng),
                                          draw_bits(cfg.cue_templates[joint], rng));
        } else {
            const auto f = build_feature(seq, seq.events.size(), current.time, cfg.kernel, cfg.layout);
            next_duration = draw_label(class_probabilities(planted.duration_block(), f), rng);
            next_state = draw_label(class_probabilities(planted.state_block(), f), rng);
        }
        const double next_time = current.time + bucket_days(next_duration);
        if (next_time > cfg.window_days) break;
        Event next{next_time, next_state, next_duration, {}};
        if (!profile_mode) next.features = draw_bits(cfg.state_templates[next_state - 1], rng);
        seq.events.push_back(std::move(next));
    }
    return seq;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (num_subjects < 0) throw InvalidArgument("num_subjects must be >= 0");
    if (labels.states < 1 || labels.durations < 1) throw InvalidArgument("need C >= 1 and D >= 1");
    if (layout.profile_dim < 0 || layout.dynamic_dim < 0) throw InvalidArgument("negative feature dims");
    kernel.validate();
    if (!(first_event_time > 0.0) || !(window_days >= first_event_time))
        throw InvalidArgument("need 0 < first_event_time <= window_days");
    if (planted) {
        if (planted->rows() != layout.total() || planted->labels != labels)
            throw InvalidArgument("planted parameter matrix does not match the configured dims");
    }
    if (!(recipe.row_density >= 0.0 && recipe.row_density <= 1.0) ||
        !(recipe.magnitude_lo <= recipe.magnitude_hi))
        throw InvalidArgument("invalid planted recipe");
    if (!profile_template.empty())
        check_probabilities(profile_template, static_cast<std::size_t>(layout.profile_dim), "profile template");
    if (!state_templates.empty()) {
        if (state_templates.size() != static_cast<std::size_t>(labels.states))
            throw InvalidArgument("need one state template per state");
        for (const auto& t : state_templates)
            check_probabilities(t, static_cast<std::size_t>(layout.dynamic_dim), "state template");
    }
    if (!imbalance_profile.empty()) {
        const auto joint = static_cast<std::size_t>(labels.states * labels.durations);
        if (imbalance_profile.size() != joint)
            throw InvalidArgument("imbalance profile needs C * D entries");
        double total = 0.0;
        for (double p : imbalance_profile) {
            if (!(p >= 0.0)) throw InvalidArgument("imbalance profile has a negative frequency");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("imbalance profile must sum to 1");
        if (!cue_templates.empty()) {
            if (cue_templates.size() != joint) throw InvalidArgument("need one cue template per joint class");
            for (const auto& t : cue_templates)
                check_probabilities(t, static_cast<std::size_t>(layout.dynamic_dim), "cue template");
        }
    }
}

GeneratorConfig resolve_defaults(const GeneratorConfig& config) {
    config.validate();
    GeneratorConfig cfg = config;
    const auto M_p = static_cast<std::size_t>(cfg.layout.profile_dim);
    const auto M_dyn = static_cast<std::size_t>(cfg.layout.dynamic_dim);
    const auto C = static_cast<std::size_t>(cfg.labels.states);

    if (cfg.profile_template.empty()) cfg.profile_template.assign(M_p, 0.3);
    if (cfg.state_templates.empty()) {
        cfg.state_templates.assign(C, std::vector<double>(M_dyn, 0.05));
        for (std::size_t j = 0; j < M_dyn; ++j) cfg.state_templates[j * C / M_dyn][j] = 0.6;
    }
    if (!cfg.imbalance_profile.empty() && cfg.cue_templates.empty()) {
        const std::size_t joint = cfg.imbalance_profile.size();
        cfg.cue_templates.assign(joint, std::vector<double>(M_dyn, 0.0));
        const std::size_t cue_dims = std::min<std::size_t>(3, M_dyn);
        for (std::size_t k = 0; k < joint; ++k) {
            Rng rng(derive_seed(cfg.seed ^ kCueStream, k));
            for (std::size_t n = 0; n < cue_dims; ++n) cfg.cue_templates[k][rng.below(M_dyn)] = 0.8;
        }
    }
    return cfg;
}

ParameterMatrix draw_planted(const GeneratorConfig& config) {
    if (config.planted) return *config.planted;
    Rng rng(derive_seed(config.seed, kPlantedStream));
    ParameterMatrix theta(config.layout.total(), config.labels);
    for (Eigen::Index m = 0; m < theta.values.rows(); ++m) {
        if (!rng.bernoulli(config.recipe.row_density)) continue;
        for (Eigen::Index k = 0; k < theta.values.cols(); ++k) {
            const double magnitude = rng.uniform(config.recipe.magnitude_lo, config.recipe.magnitude_hi);
            theta.values(m, k) = rng.bernoulli(0.5) ? magnitude : -magnitude;
        }
    }
    return theta;
}

GeneratedData generate(const GeneratorConfig& config) {
    GeneratedData data;
    data.config = resolve_defaults(config);
    data.planted = draw_planted(data.config);
    data.sequences.resize(static_cast<std::size_t>(data.config.num_subjects));

    const auto n = static_cast<std::ptrdiff_t>(data.sequences.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t u = 0; u < n; ++u) {
        try {
            data.sequences[u] = generate_subject(data.config, data.planted, static_cast<std::size_t>(u));
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return data;
}

}  // namespace mcpflow
