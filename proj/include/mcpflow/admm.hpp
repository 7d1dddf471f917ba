#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "mcpflow/parameter_matrix.hpp"
#include "mcpflow/samples.hpp"

namespace mcpflow {

struct SolverConfig {
    double gamma = 1.0;       // group-lasso weight
    double rho = 1.0;         // augmented-Lagrangian penalty
    double beta0 = 1e-4;      // initial learning rate
    double epsilon = 0.01;    // relative-change stopping bound
    int max_outer = 200;
    int max_inner = 200;
    std::uint64_t seed = 0;
    // Step k uses beta0 / (1 + (k - 1) / decay_horizon). The default of 1
    // gives beta0 / k.
    double decay_horizon = 1.0;
    // 0 means full batch.
    std::size_t batch_size = 0;

    void validate() const;
};

struct SolverReport {
    int outer_iterations = 0;
    long inner_iterations = 0;
    bool converged = false;
    double final_loss = 0.0;        // L at the returned matrix
    double theta_loss = 0.0;        // L at the final Theta iterate
    double primal_residual = 0.0;   // ||Theta - X||_F
    double theta_norm = 0.0;        // ||Theta||_F
    int nonzero_rows = 0;
    std::string returned = "X";
};

struct FitResult {
    ParameterMatrix parameters;     // X iterate, carries exact zero rows
    ParameterMatrix theta;          // smooth iterate, diagnostics only
    SolverReport report;
};

// min_Theta L(Theta) + gamma ||Theta||_{1,2} by ADMM: gradient steps on the
// Theta subproblem, block soft threshold for X, dual ascent for Y.
// The row count is taken from the sample features.
FitResult admm_fit(std::span<const TrainSample> samples, const LabelSpace& labels,
                   const SolverConfig& config);

}  // namespace mcpflow
