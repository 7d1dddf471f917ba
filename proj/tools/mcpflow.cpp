#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mcpflow/commands.hpp"
#include "mcpflow/error.hpp"

using namespace mcpflow;

namespace {

struct Flags {
    std::string kernel = "mcp";
    std::string sigma = "auto";
    std::string imbalance = "none";
    std::string balance_key = "joint";
    std::string baseline = "none";
    std::string snapshot = "auto";
    std::string profile;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw InvalidArgument("not a number: '" + item + "'");
        }
    }
    return out;
}

std::optional<double> parse_auto(const std::string& text, const char* flag) {
    if (text == "auto") return std::nullopt;
    try {
        return std::stod(text);
    } catch (const std::exception&) {
        throw InvalidArgument(std::string(flag) + " expects 'auto' or a number");
    }
}

void finish(RunConfig& config, const Flags& flags) {
    config.kernel = parse_kernel_variant(flags.kernel);
    config.sigma = parse_auto(flags.sigma, "--sigma");
    config.snapshot = parse_auto(flags.snapshot, "--snapshot");
    config.imbalance = parse_imbalance_strategy(flags.imbalance);
    if (flags.balance_key == "joint") config.balance_key = BalanceKey::Joint;
    else if (flags.balance_key == "state") config.balance_key = BalanceKey::State;
    else if (flags.balance_key == "duration") config.balance_key = BalanceKey::Duration;
    else throw InvalidArgument("--balance-key expects joint, state or duration");
    if (flags.baseline != "none" && flags.baseline != "mc")
        throw InvalidArgument("--baseline expects none or mc");
    config.markov_baseline = flags.baseline == "mc";
    if (!flags.profile.empty()) config.generator.imbalance_profile = parse_list(flags.profile);
    config.solver.validate();
}

void add_common(CLI::App* app, RunConfig& config, Flags& flags) {
    app->add_option("--data", config.data_path, "Dataset (JSON lines)");
    app->add_option("--catalog", config.catalog_path, "Feature catalog (default: <data>.catalog.json)");
    app->add_option("--seed", config.seed, "Random seed");
    app->add_option("--out", config.out_path, "Output path");
    app->add_option("--holdout", config.holdout, "Fraction of subjects held out for evaluation");
    app->add_option("--kernel", flags.kernel, "mcp | scp | mpp | lr");
    app->add_option("--sigma", flags.sigma, "auto | <value>");
}

void add_solver(CLI::App* app, RunConfig& config, Flags& flags) {
    app->add_option("--gamma", config.solver.gamma, "Group-lasso weight");
    app->add_option("--rho", config.solver.rho, "ADMM penalty");
    app->add_option("--beta0", config.solver.beta0, "Initial learning rate");
    app->add_option("--epsilon", config.solver.epsilon, "Relative-change tolerance");
    app->add_option("--max-outer", config.solver.max_outer, "Outer iteration cap");
    app->add_option("--max-inner", config.solver.max_inner, "Inner iteration cap");
    app->add_option("--decay-horizon", config.solver.decay_horizon, "Learning-rate decay horizon");
    app->add_option("--batch-size", config.solver.batch_size, "Mini-batch size (0: full batch)");
    app->add_option("--imbalance", flags.imbalance, "none | weighted | hierarchical | synthetic");
    app->add_option("--balance-key", flags.balance_key, "joint | state | duration");
}

void add_simulation(CLI::App* app, RunConfig& config, Flags& flags) {
    app->add_option("--horizon", config.horizon, "Simulation horizon in days");
    app->add_option("--rounds", config.rounds, "Simulation rounds");
    app->add_option("--snapshot", flags.snapshot, "auto | <day>");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patient-flow modeling with mutually-correcting point processes"};
    app.require_subcommand(1);
    RunConfig config;
    Flags flags;

    auto* fit = app.add_subcommand("fit", "Train a model");
    add_common(fit, config, flags);
    add_solver(fit, config, flags);
    fit->add_option("--model", config.model_path, "Model output path")->required();
    fit->add_option("--folds", config.folds, "Cross-validation folds (>= 2)");
    fit->add_option("--baseline", flags.baseline, "none | mc");

    auto* evaluate = app.add_subcommand("evaluate", "Accuracy and occupancy error");
    add_common(evaluate, config, flags);
    add_simulation(evaluate, config, flags);
    evaluate->add_option("--model", config.model_path, "Model file")->required();

    auto* simulate = app.add_subcommand("simulate", "Occupancy forecast");
    add_common(simulate, config, flags);
    add_simulation(simulate, config, flags);
    simulate->add_option("--model", config.model_path, "Model file")->required();

    auto* gen = app.add_subcommand("generate", "Synthetic dataset");
    gen->add_option("--out", config.out_path, "Dataset output path")->required();
    gen->add_option("--seed", config.seed, "Random seed");
    gen->add_option("--subjects", config.generator.num_subjects, "Number of subjects");
    gen->add_option("--states", config.generator.labels.states, "Number of states");
    gen->add_option("--durations", config.generator.labels.durations, "Number of duration buckets");
    gen->add_option("--profile-dim", config.generator.layout.profile_dim, "Static feature count");
    gen->add_option("--dynamic-dim", config.generator.layout.dynamic_dim, "Event feature count");
    gen->add_option("--window", config.generator.window_days, "Observation window in days");
    gen->add_option("--gen-sigma", config.generator.kernel.sigma, "Kernel width of the planted model");
    gen->add_option("--row-density", config.generator.recipe.row_density, "Fraction of nonzero planted rows");
    gen->add_option("--profile", flags.profile, "Joint (state, duration) frequencies, comma separated");

    auto* pre = app.add_subcommand("preprocess", "Export weights or an augmented dataset");
    add_common(pre, config, flags);
    add_solver(pre, config, flags);

    auto* sweep = app.add_subcommand("sweep", "Sparsity path over a gamma grid");
    add_common(sweep, config, flags);
    add_solver(sweep, config, flags);
    std::string gammas;
    sweep->add_option("--gammas", gammas, "Comma-separated gamma values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        finish(config, flags);
        if (*fit) {
            cmd_fit(config, std::cout);
        } else if (*evaluate) {
            cmd_evaluate(config, std::cout);
        } else if (*simulate) {
            cmd_simulate(config, std::cout);
        } else if (*gen) {
            cmd_generate(config, std::cout);
        } else if (*pre) {
            cmd_preprocess(config, std::cout);
        } else if (*sweep) {
            config.gammas = parse_list(gammas);
            cmd_sweep(config, std::cout);
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
