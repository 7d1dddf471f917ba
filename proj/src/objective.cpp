#include "mcpflow/objective.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "mcpflow/error.hpp"

namespace mcpflow {

namespace {

void check_sample(const ParameterMatrix& theta, const TrainSample& s, std::size_t index) {
    if (s.feature.size() != theta.rows())
        throw InvalidArgument("sample " + std::to_string(index) + ": feature length " +
                              std::to_string(s.feature.size()) + " != parameter rows " +
                              std::to_string(theta.rows()));
    if (s.state < 1 || s.state > theta.states())
        throw InvalidArgument("sample " + std::to_string(index) + ": state label out of range");
    if (s.duration != kNullDuration && (s.duration < 1 || s.duration > theta.durations()))
        throw InvalidArgument("sample " + std::to_string(index) + ": duration label out of range");
    if (!(s.weight > 0.0)) throw InvalidArgument("sample " + std::to_string(index) + ": weight <= 0");
}

// Softmax cross entropy for one head. Writes w * (p - onehot) into residual
// and returns -w * log p(label).
double head_term(const Eigen::Ref<const Eigen::VectorXd>& logits, int label, double weight,
                 Eigen::Ref<Eigen::VectorXd> residual) {
    const double top = logits.maxCoeff();
    residual = (logits.array() - top).exp().matrix();
    const double total = residual.sum();
    const double log_total = std::log(total);
    residual *= weight / total;
    residual[label - 1] -= weight;
    return -weight * (logits[label - 1] - top - log_total);
}

// Adds one sample's loss and gradient contributions.
double accumulate(const ParameterMatrix& theta, const TrainSample& s, std::size_t index,
                  Matrix& grad, Eigen::VectorXd& logits, Eigen::VectorXd& residual) {
    check_sample(theta, s, index);
    const int C = theta.states();
    const int D = theta.durations();

    logits.noalias() = theta.values.transpose() * s.feature;
    if (!logits.allFinite())
        throw NumericError("non-finite logits at sample " + std::to_string(index) +
                           " (max |theta| = " + std::to_string(theta.values.cwiseAbs().maxCoeff()) +
                           ", max |f| = " + std::to_string(s.feature.cwiseAbs().maxCoeff()) + ")");

    residual.setZero();
    double term = head_term(logits.head(C), s.state, s.weight, residual.head(C));
    if (s.duration != kNullDuration && D > 0)
        term += head_term(logits.tail(D), s.duration, s.weight, residual.tail(D));

    grad.noalias() += s.feature * residual.transpose();
    return term;
}

}  // namespace

Eigen::VectorXd class_probabilities(const Eigen::Ref<const Matrix>& theta_block,
                                    const Eigen::Ref<const Eigen::VectorXd>& f) {
    if (theta_block.cols() < 1) throw InvalidArgument("class_probabilities: need K >= 1");
    if (theta_block.rows() != f.size())
        throw InvalidArgument("class_probabilities: theta has " + std::to_string(theta_block.rows()) +
                              " rows but f has length " + std::to_string(f.size()));
    Eigen::VectorXd logits = theta_block.transpose() * f;
    if (!logits.allFinite()) throw NumericError("class_probabilities: non-finite logits");
    Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
    return p / p.sum();
}

LossGradient loss_and_gradient(const ParameterMatrix& theta, std::span<const TrainSample> samples) {
    if (samples.empty()) throw InvalidArgument("loss: empty sample list");
    const std::size_t n = samples.size();
    const auto chunks = static_cast<std::ptrdiff_t>((n + kReductionChunk - 1) / kReductionChunk);
    const auto rows = theta.rows();
    const auto heads = theta.labels.heads();

    std::vector<double> chunk_loss(static_cast<std::size_t>(chunks), 0.0);
    std::vector<Matrix> chunk_grad(static_cast<std::size_t>(chunks));
    std::exception_ptr failure;

#pragma omp parallel
    {
        Eigen::VectorXd logits(heads);
        Eigen::VectorXd residual(heads);
#pragma omp for schedule(static)
        for (std::ptrdiff_t c = 0; c < chunks; ++c) {
            try {
                Matrix grad = Matrix::Zero(rows, heads);
                double total = 0.0;
                const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
                const std::size_t end = std::min(n, begin + kReductionChunk);
                for (std::size_t i = begin; i < end; ++i)
                    total += accumulate(theta, samples[i], i, grad, logits, residual);
                chunk_loss[c] = total;
                chunk_grad[c] = std::move(grad);
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);

    LossGradient out{0.0, Matrix::Zero(rows, heads)};
    for (std::ptrdiff_t c = 0; c < chunks; ++c) {
        out.loss += chunk_loss[c];
        out.gradient += chunk_grad[c];
    }
    return out;
}

double loss(const ParameterMatrix& theta, std::span<const TrainSample> samples) {
    return loss_and_gradient(theta, samples).loss;
}

Matrix gradient(const ParameterMatrix& theta, std::span<const TrainSample> samples) {
    return loss_and_gradient(theta, samples).gradient;
}

namespace serial {

LossGradient loss_and_gradient(const ParameterMatrix& theta, std::span<const TrainSample> samples) {
    if (samples.empty()) throw InvalidArgument("loss: empty sample list");
    const int M = theta.rows();
    const int C = theta.states();
    const int D = theta.durations();
    LossGradient out{0.0, Matrix::Zero(M, C + D)};

    std::vector<double> logit(C + D);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const TrainSample& s = samples[i];
        check_sample(theta, s, i);
        for (int k = 0; k < C + D; ++k) {
            double z = 0.0;
            for (int m = 0; m < M; ++m) z += theta.values(m, k) * s.feature[m];
            if (!std::isfinite(z))
                throw NumericError("non-finite logit at sample " + std::to_string(i));
            logit[k] = z;
        }
        auto head = [&](int offset, int K, int label) {
            double top = logit[offset];
            for (int k = 1; k < K; ++k) top = std::max(top, logit[offset + k]);
            double total = 0.0;
            for (int k = 0; k < K; ++k) total += std::exp(logit[offset + k] - top);
            out.loss -= s.weight * (logit[offset + label - 1] - top - std::log(total));
            for (int k = 0; k < K; ++k) {
                const double p = std::exp(logit[offset + k] - top) / total;
                const double r = s.weight * (p - (k == label - 1 ? 1.0 : 0.0));
                for (int m = 0; m < M; ++m) out.gradient(m, offset + k) += r * s.feature[m];
            }
        };
        head(0, C, s.state);
        if (s.duration != kNullDuration && D > 0) head(C, D, s.duration);
    }
    return out;
}

}  // namespace serial

}  // namespace mcpflow
