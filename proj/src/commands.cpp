#include "mcpflow/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mcpflow/error.hpp"
#include "mcpflow/io.hpp"
#include "mcpflow/markov.hpp"
#include "mcpflow/objective.hpp"
#include "mcpflow/prox.hpp"
#include "mcpflow/random.hpp"

namespace mcpflow {

using json = nlohmann::json;

namespace {

constexpr std::uint64_t kSplitStream = 0x5b11;
constexpr std::uint64_t kFoldStream = 0xf01d;
constexpr std::uint64_t kSynthesisStream = 0x5e7;

std::string balance_key_name(BalanceKey key) {
    switch (key) {
        case BalanceKey::Joint: return "joint";
        case BalanceKey::State: return "state";
        case BalanceKey::Duration: return "duration";
    }
    return "?";
}

struct LoadedData {
    Catalog catalog;
    std::vector<EventSequence> sequences;
    std::string content_hash;
};

LoadedData load(const RunConfig& config) {
    if (config.data_path.empty()) throw InvalidArgument("--data is required");
    LoadedData d;
    d.catalog = read_catalog(config.resolved_catalog_path());
    d.sequences = read_dataset(config.data_path, d.catalog);
    d.content_hash = hex64(fnv1a(read_text(config.data_path)));
    return d;
}

std::string digest_of(const RunConfig& config, const std::string& data_hash,
                      const std::string& model_path = {}) {
    std::string key = config.to_json().dump() + "|" + data_hash;
    if (!model_path.empty()) key += "|" + hex64(fnv1a(read_text(model_path)));
    return hex64(fnv1a(key));
}

std::vector<EventSequence> select(const std::vector<EventSequence>& sequences,
                                  const std::vector<bool>& mask, bool keep) {
    std::vector<EventSequence> out;
    for (std::size_t i = 0; i < sequences.size(); ++i)
        if (mask[i] == keep) out.push_back(sequences[i]);
    return out;
}

std::vector<EventSequence> training_part(const RunConfig& config,
                                         const std::vector<EventSequence>& all) {
    if (config.holdout <= 0.0) return all;
    return select(all, holdout_mask(all.size(), config.holdout, config.seed), false);
}

std::vector<EventSequence> evaluation_part(const RunConfig& config,
                                           const std::vector<EventSequence>& all) {
    if (config.holdout <= 0.0) return all;
    return select(all, holdout_mask(all.size(), config.holdout, config.seed), true);
}

KernelConfig resolve_kernel(const RunConfig& config, const std::vector<EventSequence>& train) {
    KernelConfig k{config.kernel, config.sigma ? *config.sigma : mean_dwell_days(train)};
    k.validate();
    return k;
}

std::vector<std::size_t> joint_counts(const std::vector<TrainSample>& samples) {
    std::vector<std::size_t> out;
    for (const auto& [key, n] : ClassCounts::of(samples).joint) out.push_back(n);
    return out;
}

json counts_json(const std::vector<TrainSample>& samples) {
    json arr = json::array();
    for (const auto& [key, n] : ClassCounts::of(samples).joint)
        arr.push_back({{"state", key.first},
                       {"duration", key.second == kNullDuration ? json() : json(key.second)},
                       {"count", n}});
    return arr;
}

json report_json(const SolverReport& r) {
    return {{"outer_iterations", r.outer_iterations}, {"inner_iterations", r.inner_iterations},
            {"converged", r.converged},               {"final_loss", r.final_loss},
            {"primal_residual", r.primal_residual},   {"nonzero_rows", r.nonzero_rows}};
}

std::vector<TrainSample> preprocess(const RunConfig& config, std::vector<TrainSample> samples,
                                    const KernelConfig& kernel, const FeatureLayout& layout) {
    switch (config.imbalance) {
        case ImbalanceStrategy::Weighted: return apply_weights(samples);
        case ImbalanceStrategy::Synthetic: {
            SynthesisOptions options;
            options.key = config.balance_key;
            return synthesize_balanced(samples, kernel, layout,
                                       derive_seed(config.seed, kSynthesisStream), options);
        }
        case ImbalanceStrategy::None:
        case ImbalanceStrategy::Hierarchical: return samples;
    }
    return samples;
}

std::string format_optional(const std::optional<double>& v) {
    if (!v) return "n/a";
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << *v;
    return s.str();
}

}  // namespace

std::string_view to_string(ImbalanceStrategy strategy) {
    switch (strategy) {
        case ImbalanceStrategy::None: return "none";
        case ImbalanceStrategy::Weighted: return "weighted";
        case ImbalanceStrategy::Hierarchical: return "hierarchical";
        case ImbalanceStrategy::Synthetic: return "synthetic";
    }
    return "?";
}

ImbalanceStrategy parse_imbalance_strategy(std::string_view name) {
    if (name == "none") return ImbalanceStrategy::None;
    if (name == "weighted") return ImbalanceStrategy::Weighted;
    if (name == "hierarchical") return ImbalanceStrategy::Hierarchical;
    if (name == "synthetic") return ImbalanceStrategy::Synthetic;
    throw InvalidArgument("unknown imbalance strategy '" + std::string(name) + "'");
}

std::string RunConfig::resolved_catalog_path() const {
    return catalog_path.empty() ? default_catalog_path(data_path) : catalog_path;
}

json RunConfig::to_json() const {
    return {{"kernel", std::string(mcpflow::to_string(kernel))},
            {"sigma", sigma ? json(*sigma) : json("auto")},
            {"gamma", solver.gamma},
            {"rho", solver.rho},
            {"beta0", solver.beta0},
            {"epsilon", solver.epsilon},
            {"max_outer", solver.max_outer},
            {"max_inner", solver.max_inner},
            {"decay_horizon", solver.decay_horizon},
            {"batch_size", solver.batch_size},
            {"imbalance", std::string(mcpflow::to_string(imbalance))},
            {"balance_key", balance_key_name(balance_key)},
            {"baseline", markov_baseline ? "mc" : "none"},
            {"folds", folds},
            {"holdout", holdout},
            {"seed", seed},
            {"horizon", horizon},
            {"rounds", rounds},
            {"snapshot", snapshot ? json(*snapshot) : json("auto")},
            {"gammas", gammas}};
}

std::vector<bool> holdout_mask(std::size_t subjects, double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction >= 1.0) throw InvalidArgument("holdout fraction must be in [0, 1)");
    std::vector<bool> mask(subjects, false);
    for (std::size_t i = 0; i < subjects; ++i) {
        Rng rng(derive_seed(seed ^ kSplitStream, i));
        mask[i] = rng.uniform() < fraction;
    }
    return mask;
}

std::vector<EventSequence> snapshot_cohort(const std::vector<EventSequence>& sequences,
                                           double snapshot, int horizon) {
    std::vector<EventSequence> out;
    for (const auto& seq : sequences) {
        if (seq.synthetic || seq.events.empty() || seq.events.front().time > snapshot) continue;
        if (seq.window_end < snapshot + horizon) continue;
        out.push_back(seq);
    }
    return out;
}

double auto_snapshot(const std::vector<EventSequence>& sequences, int horizon) {
    std::vector<double> ends;
    double earliest = std::numeric_limits<double>::infinity();
    for (const auto& seq : sequences) {
        if (seq.events.empty()) continue;
        ends.push_back(seq.window_end);
        earliest = std::min(earliest, seq.events.front().time);
    }
    if (ends.empty()) throw InvalidArgument("no sequences with events");
    std::sort(ends.begin(), ends.end());
    const double median = ends[ends.size() / 2];
    return std::max(earliest, std::floor(median) - horizon);
}

EventSequence synthetic_record(const TrainSample& sample, const LabelSpace& labels,
                               const std::string& subject_id) {
    if (sample.duration == kNullDuration)
        throw InvalidArgument("synthetic_record: sample needs a duration label");
    EventSequence seq;
    seq.subject_id = subject_id;
    seq.synthetic = true;
    seq.static_features = sample.raw.static_features;
    const double eval = sample.raw.eval_time;
    const double elapsed = sample.raw.elapsed;
    if (elapsed > 0.0 && elapsed < eval) {
        seq.events.push_back(Event{eval - elapsed, sample.state, kNullDuration, {}});
        seq.events.push_back(Event{eval, sample.state, duration_bucket(elapsed, labels.durations),
                                   sample.raw.event_features});
    } else {
        seq.events.push_back(Event{eval, sample.state, kNullDuration, sample.raw.event_features});
    }
    seq.events.push_back(
        Event{eval + bucket_days(sample.duration), sample.state, sample.duration, {}});
    seq.window_end = seq.events.back().time;
    return seq;
}

FitSummary cmd_fit(const RunConfig& config, std::ostream& log) {
    if (config.model_path.empty()) throw InvalidArgument("--model is required for fit");
    if (config.folds == 1 || config.folds < 0) throw InvalidArgument("--folds must be >= 2 when given");
    const LoadedData data = load(config);
    const auto train = training_part(config, data.sequences);
    if (train.empty()) throw InvalidArgument("no training sequences after the holdout split");
    const FeatureLayout layout = data.catalog.layout();
    const LabelSpace labels = data.catalog.labels();
    const KernelConfig kernel = resolve_kernel(config, train);

    FitSummary summary;
    summary.model_path = config.model_path;
    summary.digest = digest_of(config, data.content_hash);
    summary.sigma = kernel.sigma;

    json extra = {{"config_digest", summary.digest},
                  {"config", config.to_json()},
                  {"sigma", kernel.sigma},
                  {"sigma_source", config.sigma ? "given" : "auto"},
                  {"training_subjects", train.size()}};

    if (config.markov_baseline) {
        MarkovModel model(mc_fit(train, labels.states, LabelHead::State),
                          mc_fit(train, labels.durations, LabelHead::Duration));
        write_model(config.model_path, model, data.catalog.hash_hex(), extra);
        log << "fit: markov-chain baseline written to " << config.model_path << "\n";
        return summary;
    }

    const auto base = build_training_samples(train, kernel, layout);
    if (base.empty()) throw InvalidArgument("dataset yields no training samples");
    SolverConfig solver = config.solver;
    solver.seed = config.seed;

    if (config.imbalance == ImbalanceStrategy::Hierarchical) {
        if (config.folds >= 2) throw InvalidArgument("--folds is not supported with hierarchical");
        HierarchicalModel model(hierarchical_fit(base, LabelHead::State, solver),
                                hierarchical_fit(base, LabelHead::Duration, solver), labels, kernel,
                                layout);
        summary.training_samples = base.size();
        summary.class_counts_after = joint_counts(base);
        extra["imbalance"] = "hierarchical";
        extra["training_samples"] = base.size();
        json order = json::array();
        for (int c : model.state_chain().order()) order.push_back(c);
        extra["state_order"] = order;
        write_model(config.model_path, model, data.catalog.hash_hex(), extra);
        log << "fit: hierarchical chains written to " << config.model_path << "\n";
        return summary;
    }

    ParameterMatrix averaged(layout.total(), labels);
    SolverReport report;
    if (config.folds >= 2) {
        std::vector<std::size_t> fold_of(train.size());
        {
            std::vector<std::size_t> order(train.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            Rng rng(derive_seed(config.seed, kFoldStream));
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
            for (std::size_t r = 0; r < order.size(); ++r)
                fold_of[order[r]] = r % static_cast<std::size_t>(config.folds);
        }
        json fold_reports = json::array();
        for (int f = 0; f < config.folds; ++f) {
            std::vector<EventSequence> part;
            for (std::size_t i = 0; i < train.size(); ++i)
                if (fold_of[i] != static_cast<std::size_t>(f)) part.push_back(train[i]);
            auto samples = preprocess(config, build_training_samples(part, kernel, layout), kernel, layout);
            if (samples.empty()) throw InvalidArgument("fold " + std::to_string(f) + " has no samples");
            auto fit = admm_fit(samples, labels, solver);
            averaged.values += fit.parameters.values;
            fold_reports.push_back(report_json(fit.report));
            log << "fit: fold " << f + 1 << "/" << config.folds << " loss " << fit.report.final_loss
                << ", nonzero rows " << fit.report.nonzero_rows << "\n";
        }
        averaged.values /= static_cast<double>(config.folds);
        extra["fold_reports"] = fold_reports;
        report.outer_iterations = 0;
        report.returned = "mean of fold X";
    }

    const auto samples = preprocess(config, base, kernel, layout);
    summary.training_samples = samples.size();
    summary.class_counts_after = joint_counts(samples);
    extra["imbalance"] = std::string(to_string(config.imbalance));
    extra["training_samples"] = samples.size();
    extra["class_counts"] = counts_json(samples);

    if (config.folds < 2) {
        auto fit = admm_fit(samples, labels, solver);
        averaged = std::move(fit.parameters);
        report = fit.report;
    } else {
        report.final_loss = loss(averaged, samples);
        report.nonzero_rows = nonzero_rows(averaged.values);
        report.converged = true;
    }
    summary.report = report;

    PointProcessModel model(std::move(averaged), kernel, layout);
    model.report = report;
    write_model(config.model_path, model, data.catalog.hash_hex(), extra);
    log << "fit: " << samples.size() << " samples, loss " << report.final_loss << ", nonzero rows "
        << report.nonzero_rows << "/" << layout.total() << ", outer " << report.outer_iterations
        << (report.converged ? " (converged)" : " (iteration cap)") << " -> " << config.model_path
        << "\n";
    return summary;
}

EvaluateSummary cmd_evaluate(const RunConfig& config, std::ostream& out) {
    if (config.model_path.empty()) throw InvalidArgument("--model is required for evaluate");
    const LoadedData data = load(config);
    const ModelEnvelope env = read_model(config.model_path, data.catalog.hash_hex());
    const auto& model = *env.model;
    if (model.labels() != data.catalog.labels())
        throw ValidationError("model label space does not match the catalog");

    std::vector<EventSequence> test;
    for (auto& seq : evaluation_part(config, data.sequences))
        if (!seq.synthetic) test.push_back(std::move(seq));

    EvaluateSummary summary;
    summary.digest = digest_of(config, data.content_hash, config.model_path);
    const FlowEvaluation ev = evaluate_sequences(model, test);
    const LabelSpace labels = model.labels();
    summary.states = accuracy_report(ev.predicted_states, ev.true_states, labels.states);
    summary.durations = accuracy_report(ev.predicted_durations, ev.true_durations, labels.durations);

    summary.snapshot = config.snapshot ? *config.snapshot : auto_snapshot(test, config.horizon);
    const auto cohort = snapshot_cohort(test, summary.snapshot, config.horizon);
    summary.cohort_size = cohort.size();
    OccupancyMatrix real, sim;
    if (!cohort.empty()) {
        std::vector<EventSequence> prefixes;
        for (const auto& seq : cohort) prefixes.push_back(truncate(seq, summary.snapshot));
        real = observed_occupancy(cohort, summary.snapshot, config.horizon, labels.states);
        sim = simulate_cohort(model, model, prefixes, {config.horizon, config.rounds, config.seed});
        summary.simulation = relative_sim_error(real, sim);
    }

    const auto& cat = data.catalog;
    std::ostringstream csv;
    csv << "# config_digest=" << summary.digest << "\n";
    csv << "metric,label,value\n";
    out << "model kind: " << to_string(model.kind()) << "   events: " << ev.true_states.size()
        << "   digest: " << summary.digest << "\n\n";
    out << std::left << std::setw(16) << "state" << std::setw(10) << "AC_c" << "n\n";
    for (int k = 0; k < labels.states; ++k) {
        const auto& v = summary.states.per_class[static_cast<std::size_t>(k)];
        out << std::setw(16) << cat.states[static_cast<std::size_t>(k)] << std::setw(10)
            << format_optional(v) << summary.states.totals[static_cast<std::size_t>(k)] << "\n";
        csv << "AC_c," << cat.states[static_cast<std::size_t>(k)] << "," << (v ? std::to_string(*v) : "") << "\n";
    }
    out << std::setw(16) << "overall AC_C" << format_optional(summary.states.overall) << "\n\n";
    csv << "AC_C,all," << summary.states.overall << "\n";
    out << std::setw(16) << "duration" << std::setw(10) << "AC_d" << "n\n";
    for (int k = 0; k < labels.durations; ++k) {
        const auto& v = summary.durations.per_class[static_cast<std::size_t>(k)];
        out << std::setw(16) << cat.durations[static_cast<std::size_t>(k)] << std::setw(10)
            << format_optional(v) << summary.durations.totals[static_cast<std::size_t>(k)] << "\n";
        csv << "AC_d," << cat.durations[static_cast<std::size_t>(k)] << "," << (v ? std::to_string(*v) : "") << "\n";
    }
    out << std::setw(16) << "overall AC_D" << format_optional(summary.durations.overall) << "\n\n";
    csv << "AC_D,all," << summary.durations.overall << "\n";

    if (summary.simulation) {
        const auto& err = *summary.simulation;
        out << "simulation from day " << summary.snapshot << ", horizon " << config.horizon
            << " days, cohort " << summary.cohort_size << ", rounds " << config.rounds << "\n";
        for (int c = 0; c < labels.states; ++c) {
            const auto& v = err.per_unit[static_cast<std::size_t>(c)];
            out << std::setw(16) << cat.states[static_cast<std::size_t>(c)] << "Err_c "
                << format_optional(v) << "\n";
            csv << "Err_c," << cat.states[static_cast<std::size_t>(c)] << "," << (v ? std::to_string(*v) : "") << "\n";
        }
        out << std::setw(16) << "overall" << "Err_C " << format_optional(err.overall) << "\n";
        if (err.skipped_cells > 0) out << "(" << err.skipped_cells << " zero-count cells skipped)\n";
        csv << "Err_C,all," << (err.overall ? std::to_string(*err.overall) : "") << "\n";
    } else {
        out << "simulation: no subjects observed through the horizon after day " << summary.snapshot << "\n";
    }
    if (!config.out_path.empty()) write_text(config.out_path, csv.str());
    return summary;
}

SimulateSummary cmd_simulate(const RunConfig& config, std::ostream& out) {
    if (config.model_path.empty()) throw InvalidArgument("--model is required for simulate");
    const LoadedData data = load(config);
    const ModelEnvelope env = read_model(config.model_path, data.catalog.hash_hex());

    std::vector<EventSequence> cohort;
    for (const auto& seq : data.sequences) {
        if (seq.synthetic || seq.events.empty()) continue;
        if (config.snapshot) {
            if (seq.events.front().time > *config.snapshot) continue;
            cohort.push_back(truncate(seq, *config.snapshot));
        } else {
            cohort.push_back(seq);
        }
    }
    SimulateSummary summary;
    summary.digest = digest_of(config, data.content_hash, config.model_path);
    summary.occupancy =
        simulate_cohort(*env.model, *env.model, cohort, {config.horizon, config.rounds, config.seed});

    std::ostringstream csv;
    csv << "# config_digest=" << summary.digest << "\n";
    csv << "day";
    for (const auto& name : data.catalog.states) csv << "," << name;
    csv << ",total\n";
    for (int d = 0; d < summary.occupancy.days(); ++d) {
        csv << d + 1;
        for (int c = 0; c < summary.occupancy.units(); ++c) csv << "," << summary.occupancy.counts(c, d);
        csv << "," << summary.occupancy.total(d) << "\n";
    }
    if (config.out_path.empty())
        out << csv.str();
    else
        write_text(config.out_path, csv.str());
    return summary;
}

GenerateSummary cmd_generate(const RunConfig& config, std::ostream& log) {
    if (config.out_path.empty()) throw InvalidArgument("--out is required for generate");
    GeneratorConfig gen = config.generator;
    gen.seed = config.seed;
    const GeneratedData data = generate(gen);
    const Catalog catalog = Catalog::synthetic(gen.layout, gen.labels);

    GenerateSummary summary;
    summary.dataset_path = config.out_path;
    summary.catalog_path = default_catalog_path(config.out_path);
    const auto stem = summary.catalog_path.substr(0, summary.catalog_path.size() - std::string(".catalog.json").size());
    summary.manifest_path = stem + ".manifest.json";

    const std::string text = dataset_to_string(data.sequences);
    summary.digest = hex64(fnv1a(text));
    write_text(summary.dataset_path, text);
    write_catalog(summary.catalog_path, catalog);
    json manifest = generator_manifest(data);
    manifest["dataset_digest"] = summary.digest;
    write_text(summary.manifest_path, manifest.dump(2) + "\n");

    std::size_t events = 0;
    for (const auto& s : data.sequences) events += s.events.size();
    log << "generate: " << data.sequences.size() << " subjects, " << events << " events -> "
        << summary.dataset_path << " (digest " << summary.digest << ")\n";
    return summary;
}

void cmd_preprocess(const RunConfig& config, std::ostream& log) {
    if (config.out_path.empty()) throw InvalidArgument("--out is required for preprocess");
    const LoadedData data = load(config);
    const auto train = training_part(config, data.sequences);
    const KernelConfig kernel = resolve_kernel(config, train);
    const FeatureLayout layout = data.catalog.layout();
    const auto samples = build_training_samples(train, kernel, layout);
    const ClassCounts before = ClassCounts::of(samples);

    switch (config.imbalance) {
        case ImbalanceStrategy::Synthetic: {
            const auto augmented = preprocess(config, samples, kernel, layout);
            std::vector<EventSequence> records = train;
            std::size_t k = 0;
            for (const auto& s : augmented) {
                if (!s.synthetic) continue;
                records.push_back(synthetic_record(s, data.catalog.labels(), "synthetic-" + std::to_string(++k)));
            }
            write_dataset(config.out_path, records);
            log << "preprocess: " << samples.size() << " samples + " << k << " synthesized -> "
                << config.out_path << "\n";
            break;
        }
        case ImbalanceStrategy::Weighted: {
            std::ostringstream csv;
            csv << "# config_digest=" << digest_of(config, data.content_hash) << "\n";
            csv << "state,duration,count,weight\n";
            for (const auto& [key, n] : before.joint)
                csv << key.first << "," << key.second << "," << n << ","
                    << weight_for_count(static_cast<double>(n)) << "\n";
            write_text(config.out_path, csv.str());
            log << "preprocess: weights for " << before.joint.size() << " joint classes -> "
                << config.out_path << "\n";
            break;
        }
        case ImbalanceStrategy::None:
        case ImbalanceStrategy::Hierarchical:
            throw InvalidArgument("preprocess supports --imbalance weighted or synthetic");
    }
    for (const auto& [key, n] : before.joint)
        log << "  class (" << key.first << ", " << key.second << "): " << n << "\n";
}

void cmd_sweep(const RunConfig& config, std::ostream& out) {
    if (config.gammas.empty()) throw InvalidArgument("sweep needs at least one gamma");
    const LoadedData data = load(config);
    const auto train = training_part(config, data.sequences);
    const KernelConfig kernel = resolve_kernel(config, train);
    const FeatureLayout layout = data.catalog.layout();
    const LabelSpace labels = data.catalog.labels();
    const auto samples = preprocess(config, build_training_samples(train, kernel, layout), kernel, layout);

    std::ostringstream csv;
    csv << "# config_digest=" << digest_of(config, data.content_hash) << "\n";
    csv << "gamma,nonzero_rows,final_loss,group_norm,state_accuracy,duration_accuracy\n";
    for (double gamma : config.gammas) {
        SolverConfig solver = config.solver;
        solver.gamma = gamma;
        solver.seed = config.seed;
        const auto fit = admm_fit(samples, labels, solver);
        PointProcessModel model(fit.parameters, kernel, layout);
        const auto ev = evaluate_sequences(model, train);
        const double ac_c = accuracy_report(ev.predicted_states, ev.true_states, labels.states).overall;
        const double ac_d =
            accuracy_report(ev.predicted_durations, ev.true_durations, labels.durations).overall;
        csv << gamma << "," << fit.report.nonzero_rows << "," << fit.report.final_loss << ","
            << group_norm(fit.parameters.values) << "," << ac_c << "," << ac_d << "\n";
    }
    out << csv.str();
    if (!config.out_path.empty()) write_text(config.out_path, csv.str());
}

}  // namespace mcpflow
