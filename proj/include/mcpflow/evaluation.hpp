#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mcpflow/model.hpp"

namespace mcpflow {

struct FlowPrediction {
    int state = 1;
    int duration = 1;
    bool operator==(const FlowPrediction&) const = default;
};

FlowPrediction predict_next(const FlowModel& model, const EventSequence& seq,
                            std::size_t history_len, double t);

struct AccuracyReport {
    std::vector<std::optional<double>> per_class;  // index k holds label k + 1
    std::vector<std::size_t> correct;
    std::vector<std::size_t> totals;
    double overall = 0.0;
};

AccuracyReport accuracy_report(std::span<const int> predictions, std::span<const int> truths,
                               int num_classes);

// Predictions and truths for every event i >= 2 of every sequence.
struct FlowEvaluation {
    std::vector<int> predicted_states, true_states;
    std::vector<int> predicted_durations, true_durations;
};

FlowEvaluation evaluate_sequences(const FlowModel& model, std::span<const EventSequence> sequences);

// Daily unit counts. counts(c, d) is unit c + 1 on day d + 1.
struct OccupancyMatrix {
    Eigen::MatrixXd counts;

    int units() const noexcept { return static_cast<int>(counts.rows()); }
    int days() const noexcept { return static_cast<int>(counts.cols()); }
    double total(int day) const { return counts.col(day).sum(); }
};

// Real occupancy: unit held by each sequence at start + d for d = 1..horizon
// (state of the latest event at or before that time). A sequence counts on a
// day only if it has an event by then and its window covers it.
OccupancyMatrix observed_occupancy(std::span<const EventSequence> sequences, double start,
                                   int horizon, int units);

struct SimulationConfig {
    int horizon = 7;
    int rounds = 1;
    std::uint64_t seed = 0;
};

// Rolls every patient forward from their last observed event: duration and
// destination are drawn from the models at the current event, the patient
// holds the unit for the bucket's days, and a simulated event carrying the
// last observed raw features is appended. Day d (1..horizon) counts the unit
// held at window_end + d. Counts are averaged over rounds.
OccupancyMatrix simulate_cohort(const FlowModel& state_model, const FlowModel& duration_model,
                                std::span<const EventSequence> cohort,
                                const SimulationConfig& config);

struct SimulationError {
    std::vector<std::optional<double>> per_unit;
    std::optional<double> overall;
    std::size_t skipped_cells = 0;  // real count was zero
};

// Err_c = mean_d |N_cd - N^_cd| / N_cd over days with N_cd > 0; Err_C the same
// on daily totals.
SimulationError relative_sim_error(const OccupancyMatrix& real, const OccupancyMatrix& sim);

}  // namespace mcpflow
