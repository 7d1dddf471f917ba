#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcpflow/admm.hpp"
#include "mcpflow/datagen.hpp"
#include "mcpflow/evaluation.hpp"
#include "mcpflow/imbalance.hpp"

namespace mcpflow {

enum class ImbalanceStrategy { None, Weighted, Hierarchical, Synthetic };

std::string_view to_string(ImbalanceStrategy strategy);
ImbalanceStrategy parse_imbalance_strategy(std::string_view name);

struct RunConfig {
    std::string data_path;
    std::string catalog_path;  // empty: derived from data_path
    std::string model_path;
    std::string out_path;

    KernelVariant kernel = KernelVariant::MCP;
    std::optional<double> sigma;  // empty: mean dwell time of the training data
    SolverConfig solver;
    ImbalanceStrategy imbalance = ImbalanceStrategy::None;
    BalanceKey balance_key = BalanceKey::Joint;
    bool markov_baseline = false;

    int folds = 0;          // < 2: single fit
    double holdout = 0.0;   // fraction of subjects reserved for evaluation
    std::uint64_t seed = 0;

    int horizon = 7;
    int rounds = 10;
    std::optional<double> snapshot;

    GeneratorConfig generator;
    std::vector<double> gammas;

    std::string resolved_catalog_path() const;
    nlohmann::json to_json() const;
};

struct FitSummary {
    std::string model_path;
    std::string digest;
    double sigma = 0.0;
    std::size_t training_samples = 0;
    std::vector<std::size_t> class_counts_after;  // joint counts after preprocessing
    SolverReport report;
};

struct EvaluateSummary {
    std::string digest;
    AccuracyReport states;
    AccuracyReport durations;
    std::optional<SimulationError> simulation;
    std::size_t cohort_size = 0;
    double snapshot = 0.0;
};

struct SimulateSummary {
    std::string digest;
    OccupancyMatrix occupancy;
};

struct GenerateSummary {
    std::string dataset_path;
    std::string catalog_path;
    std::string manifest_path;
    std::string digest;  // of the dataset file contents
};

FitSummary cmd_fit(const RunConfig& config, std::ostream& log);
EvaluateSummary cmd_evaluate(const RunConfig& config, std::ostream& out);
SimulateSummary cmd_simulate(const RunConfig& config, std::ostream& out);
GenerateSummary cmd_generate(const RunConfig& config, std::ostream& log);
void cmd_preprocess(const RunConfig& config, std::ostream& log);
void cmd_sweep(const RunConfig& config, std::ostream& out);

// Subject-level split: true for subjects reserved by holdout.
std::vector<bool> holdout_mask(std::size_t subjects, double fraction, std::uint64_t seed);

// Sequences with their first event by `snapshot` and a window covering the
// horizon after it.
std::vector<EventSequence> snapshot_cohort(const std::vector<EventSequence>& sequences,
                                           double snapshot, int horizon);
double auto_snapshot(const std::vector<EventSequence>& sequences, int horizon);

// Dataset record whose only training sample reproduces a synthesized sample.
EventSequence synthetic_record(const TrainSample& sample, const LabelSpace& labels,
                               const std::string& subject_id);

}  // namespace mcpflow
