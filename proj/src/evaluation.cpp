#include "mcpflow/evaluation.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "mcpflow/error.hpp"
#include "mcpflow/random.hpp"

namespace mcpflow {

FlowPrediction predict_next(const FlowModel& model, const EventSequence& seq,
                            std::size_t history_len, double t) {
    return {argmax_label(model.state_distribution(seq, history_len, t)),
            argmax_label(model.duration_distribution(seq, history_len, t))};
}

AccuracyReport accuracy_report(std::span<const int> predictions, std::span<const int> truths,
                               int num_classes) {
    if (predictions.size() != truths.size())
        throw InvalidArgument("accuracy_report: " + std::to_string(predictions.size()) +
                              " predictions vs " + std::to_string(truths.size()) + " truths");
    if (num_classes < 1) throw InvalidArgument("accuracy_report: empty catalog");
    const auto K = static_cast<std::size_t>(num_classes);
    AccuracyReport report;
    report.correct.assign(K, 0);
    report.totals.assign(K, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const int truth = truths[i];
        if (truth < 1 || truth > num_classes)
            throw InvalidArgument("accuracy_report: truth label " + std::to_string(truth) + " out of range");
        ++report.totals[static_cast<std::size_t>(truth - 1)];
        if (predictions[i] == truth) {
            ++report.correct[static_cast<std::size_t>(truth - 1)];
            ++correct;
        }
    }
    report.per_class.resize(K);
    for (std::size_t k = 0; k < K; ++k)
        if (report.totals[k] > 0)
            report.per_class[k] =
                static_cast<double>(report.correct[k]) / static_cast<double>(report.totals[k]);
    report.overall = truths.empty() ? 0.0
                                    : static_cast<double>(correct) / static_cast<double>(truths.size());
    return report;
}

FlowEvaluation evaluate_sequences(const FlowModel& model, std::span<const EventSequence> sequences) {
    const auto n = static_cast<std::ptrdiff_t>(sequences.size());
    std::vector<FlowEvaluation> parts(sequences.size());
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t u = 0; u < n; ++u) {
        try {
            const EventSequence& seq = sequences[u];
            FlowEvaluation& part = parts[u];
            for (std::size_t i = 1; i < seq.events.size(); ++i) {
                const auto p = predict_next(model, seq, i, seq.events[i - 1].time);
                part.predicted_states.push_back(p.state);
                part.true_states.push_back(seq.events[i].state);
                part.predicted_durations.push_back(p.duration);
                part.true_durations.push_back(seq.events[i].duration);
            }
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    FlowEvaluation out;
    auto append = [](std::vector<int>& dst, const std::vector<int>& src) {
        dst.insert(dst.end(), src.begin(), src.end());
    };
    for (const auto& part : parts) {
        append(out.predicted_states, part.predicted_states);
        append(out.true_states, part.true_states);
        append(out.predicted_durations, part.predicted_durations);
        append(out.true_durations, part.true_durations);
    }
    return out;
}

OccupancyMatrix observed_occupancy(std::span<const EventSequence> sequences, double start,
                                   int horizon, int units) {
    if (horizon < 1) throw InvalidArgument("observed_occupancy: horizon must be >= 1");
    OccupancyMatrix occ{Eigen::MatrixXd::Zero(units, horizon)};
    for (const auto& seq : sequences) {
        for (int d = 0; d < horizon; ++d) {
            const double when = start + d + 1;
            if (when > seq.window_end) break;
            int unit = 0;
            for (const auto& e : seq.events) {
                if (e.time > when) break;
                unit = e.state;
            }
            if (unit < 1) continue;
            if (unit > units) throw InvalidArgument("observed_occupancy: state outside catalog");
            occ.counts(unit - 1, d) += 1.0;
        }
    }
    return occ;
}

namespace {

std::size_t draw(const Eigen::VectorXd& p, Rng& rng) {
    return rng.categorical(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

// Adds one simulated trajectory to counts.
void roll_forward(const FlowModel& state_model, const FlowModel& duration_model,
                  const EventSequence& prefix, int horizon, Rng& rng, Eigen::MatrixXd& counts) {
    if (prefix.events.empty())
        throw InvalidArgument("simulate_cohort: patient '" + prefix.subject_id + "' has no events");
    EventSequence seq = prefix;
    const std::vector<int> carried = prefix.events.back().features;
    const int units = static_cast<int>(counts.rows());

    double t = seq.events.back().time;
    int unit = seq.events.back().state;
    const double last_day = prefix.window_end + horizon;
    while (true) {
        const std::size_t history = seq.events.size();
        const int duration = static_cast<int>(draw(duration_model.duration_distribution(seq, history, t), rng)) + 1;
        const int next = static_cast<int>(draw(state_model.state_distribution(seq, history, t), rng)) + 1;
        const double leave = t + bucket_days(duration);

        if (unit < 1 || unit > units) throw InvalidArgument("simulate_cohort: state outside catalog");
        for (int d = 0; d < horizon; ++d) {
            const double when = prefix.window_end + d + 1;
            if (when >= t && when < leave) counts(unit - 1, d) += 1.0;
        }
        if (leave > last_day) break;
        seq.events.push_back(Event{leave, next, duration, carried});
        t = leave;
        unit = next;
    }
}

}  // namespace

OccupancyMatrix simulate_cohort(const FlowModel& state_model, const FlowModel& duration_model,
                                std::span<const EventSequence> cohort,
                                const SimulationConfig& config) {
    if (config.horizon < 1) throw InvalidArgument("simulate_cohort: horizon must be >= 1");
    if (config.rounds < 1) throw InvalidArgument("simulate_cohort: rounds must be >= 1");
    if (cohort.empty()) throw InvalidArgument("simulate_cohort: empty cohort");

    const int units = state_model.labels().states;
    const auto patients = static_cast<std::ptrdiff_t>(cohort.size());
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(units, config.horizon);
    std::exception_ptr failure;

    for (int round = 0; round < config.rounds; ++round) {
        const std::uint64_t round_seed = derive_seed(config.seed, static_cast<std::uint64_t>(round));
#pragma omp parallel
        {
            // Counts are whole numbers, so the merge is exact in any order.
            Eigen::MatrixXd local = Eigen::MatrixXd::Zero(units, config.horizon);
#pragma omp for schedule(dynamic, 32)
            for (std::ptrdiff_t u = 0; u < patients; ++u) {
                try {
                    Rng rng(derive_seed(round_seed, static_cast<std::uint64_t>(u)));
                    roll_forward(state_model, duration_model, cohort[u], config.horizon, rng, local);
                } catch (...) {
#pragma omp critical
                    if (!failure) failure = std::current_exception();
                }
            }
#pragma omp critical
            total += local;
        }
        if (failure) std::rethrow_exception(failure);
    }
    return OccupancyMatrix{total / static_cast<double>(config.rounds)};
}

SimulationError relative_sim_error(const OccupancyMatrix& real, const OccupancyMatrix& sim) {
    if (real.units() != sim.units() || real.days() != sim.days())
        throw InvalidArgument("relative_sim_error: occupancy shapes differ");
    SimulationError err;
    err.per_unit.resize(static_cast<std::size_t>(real.units()));
    for (int c = 0; c < real.units(); ++c) {
        double sum = 0.0;
        int included = 0;
        for (int d = 0; d < real.days(); ++d) {
            const double n = real.counts(c, d);
            if (n <= 0.0) {
                ++err.skipped_cells;
                continue;
            }
            sum += std::abs(n - sim.counts(c, d)) / n;
            ++included;
        }
        if (included > 0) err.per_unit[static_cast<std::size_t>(c)] = sum / included;
    }
    double sum = 0.0;
    int included = 0;
    for (int d = 0; d < real.days(); ++d) {
        const double n = real.total(d);
        if (n <= 0.0) continue;
        sum += std::abs(n - sim.total(d)) / n;
        ++included;
    }
    if (included > 0) err.overall = sum / included;
    return err;
}

}  // namespace mcpflow
