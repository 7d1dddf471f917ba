#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "mcpflow/parameter_matrix.hpp"
#include "mcpflow/samples.hpp"

namespace mcpflow {

// Softmax of the logits theta_k . f over the K columns of theta_block
// (log-sum-exp stabilised). These are the normalised intensities
// lambda_k / sum_k' lambda_k'.
Eigen::VectorXd class_probabilities(const Eigen::Ref<const Matrix>& theta_block,
                                    const Eigen::Ref<const Eigen::VectorXd>& f);

struct LossGradient {
    double loss = 0.0;
    Matrix gradient;
};

// Weighted cross entropy
//   L = -sum_i w_i [ log p(c_i | f_i) + log p(d_i | f_i) ]
// where the duration term is dropped for null-duration samples. Evaluated in
// fixed-size chunks across OpenMP threads and reduced in chunk order, so the
// result does not depend on the thread count.
LossGradient loss_and_gradient(const ParameterMatrix& theta, std::span<const TrainSample> samples);

double loss(const ParameterMatrix& theta, std::span<const TrainSample> samples);
Matrix gradient(const ParameterMatrix& theta, std::span<const TrainSample> samples);

// Serial single-loop versions kept as the reference for the parallel kernels.
namespace serial {
LossGradient loss_and_gradient(const ParameterMatrix& theta, std::span<const TrainSample> samples);
}  // namespace serial

// Samples per reduction chunk.
inline constexpr std::size_t kReductionChunk = 64;

}  // namespace mcpflow
