#include "mcpflow/admm.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mcpflow/error.hpp"
#include "mcpflow/objective.hpp"
#include "mcpflow/prox.hpp"
#include "mcpflow/random.hpp"

namespace mcpflow {

void SolverConfig::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
    if (!(rho > 0.0)) throw InvalidArgument("rho must be > 0");
    if (!(beta0 > 0.0)) throw InvalidArgument("beta0 must be > 0");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
    if (max_outer < 1 || max_inner < 1) throw InvalidArgument("iteration caps must be >= 1");
    if (!(decay_horizon > 0.0)) throw InvalidArgument("decay_horizon must be > 0");
}

namespace {

// Floor on the primal-residual test so that an all-zero solution can converge.
constexpr double kAbsoluteResidual = 1e-8;

double relative_change(const Matrix& current, const Matrix& previous) {
    const double diff = (current - previous).norm();
    const double scale = current.norm();
    if (scale == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / scale;
}

// Cycles through a seeded permutation of the samples in fixed-size batches.
class BatchSampler {
public:
    BatchSampler(std::span<const TrainSample> samples, std::size_t batch_size, Rng& rng)
        : samples_(samples), batch_size_(batch_size) {
        if (!full_batch()) {
            order_.resize(samples.size());
            std::iota(order_.begin(), order_.end(), std::size_t{0});
            for (std::size_t i = order_.size() - 1; i > 0; --i)
                std::swap(order_[i], order_[rng.below(i + 1)]);
        }
    }

    bool full_batch() const { return batch_size_ == 0 || batch_size_ >= samples_.size(); }

    std::span<const TrainSample> next() {
        if (full_batch()) return samples_;
        batch_.clear();
        for (std::size_t k = 0; k < batch_size_; ++k) {
            batch_.push_back(samples_[order_[cursor_]]);
            cursor_ = (cursor_ + 1) % order_.size();
        }
        return batch_;
    }

    double scale() const {
        return full_batch() ? 1.0
                            : static_cast<double>(samples_.size()) / static_cast<double>(batch_size_);
    }

private:
    std::span<const TrainSample> samples_;
    std::size_t batch_size_;
    std::vector<std::size_t> order_;
    std::vector<TrainSample> batch_;
    std::size_t cursor_ = 0;
};

}  // namespace

FitResult admm_fit(std::span<const TrainSample> samples, const LabelSpace& labels,
                   const SolverConfig& config) {
    config.validate();
    if (samples.empty()) throw InvalidArgument("admm_fit: empty sample list");
    if (labels.states < 1) throw InvalidArgument("admm_fit: need at least one state head");
    const auto rows = static_cast<int>(samples.front().feature.size());

    Rng rng(config.seed);
    ParameterMatrix theta(rows, labels);
    for (Eigen::Index m = 0; m < theta.values.rows(); ++m)
        for (Eigen::Index k = 0; k < theta.values.cols(); ++k)
            theta.values(m, k) = rng.uniform(-0.01, 0.01);
    Matrix x = theta.values;
    Matrix y = Matrix::Zero(rows, labels.heads());
    BatchSampler batches(samples, config.batch_size, rng);

    const double tau = config.gamma / config.rho;
    long step = 0;
    SolverReport report;

    for (int outer = 1; outer <= config.max_outer; ++outer) {
        const Matrix outer_start = theta.values;
        for (int inner = 1; inner <= config.max_inner; ++inner) {
            ++step;
            const double beta =
                config.beta0 / (1.0 + static_cast<double>(step - 1) / config.decay_horizon);
            LossGradient lg;
            try {
                lg = loss_and_gradient(theta, batches.next());
            } catch (const NumericError& e) {
                throw SolverError(std::string("objective diverged: ") + e.what(), step);
            }
            lg.gradient *= batches.scale();
            if (!std::isfinite(lg.loss) || !lg.gradient.allFinite())
                throw SolverError("objective diverged: non-finite loss or gradient", step);

            Matrix next = theta.values -
                          beta * (lg.gradient + config.rho * (theta.values - x + y));
            if (!next.allFinite()) throw SolverError("objective diverged: non-finite iterate", step);
            const double change = relative_change(next, theta.values);
            theta.values = std::move(next);
            if (change <= config.epsilon) break;
        }
        x = group_lasso_prox(theta.values + y, tau);
        y += theta.values - x;

        report.outer_iterations = outer;
        const double residual = (theta.values - x).norm();
        const double residual_tol =
            config.epsilon * std::max(theta.values.norm(), x.norm()) + kAbsoluteResidual;
        if (relative_change(theta.values, outer_start) <= config.epsilon && residual <= residual_tol) {
            report.converged = true;
            break;
        }
    }

    FitResult result{ParameterMatrix(x, labels), theta, {}};
    report.inner_iterations = step;
    try {
        report.final_loss = loss(result.parameters, samples);
        report.theta_loss = loss(theta, samples);
    } catch (const NumericError& e) {
        throw SolverError(std::string("objective diverged: ") + e.what(), step);
    }
    report.primal_residual = (theta.values - x).norm();
    report.theta_norm = theta.values.norm();
    report.nonzero_rows = nonzero_rows(x);
    result.report = report;
    return result;
}

}  // namespace mcpflow
