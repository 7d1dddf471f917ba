#pragma once

#include <string>
#include <utility>

#include <Eigen/Core>

#include "mcpflow/error.hpp"
#include "mcpflow/sequence.hpp"

namespace mcpflow {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Theta: one row per feature dimension (a lasso group), one column per head.
// Columns [0, C) are the state heads, [C, C + D) the duration heads. Rows
// [0, M_p) act on the static block, the rest on the history block.
struct ParameterMatrix {
    Matrix values;
    LabelSpace labels;

    ParameterMatrix() = default;
    ParameterMatrix(int rows, LabelSpace label_space)
        : values(Matrix::Zero(rows, label_space.heads())), labels(label_space) {}
    ParameterMatrix(Matrix m, LabelSpace label_space)
        : values(std::move(m)), labels(label_space) {
        if (values.cols() != labels.heads())
            throw InvalidArgument("parameter matrix has " + std::to_string(values.cols()) +
                                  " columns, expected " + std::to_string(labels.heads()));
    }

    int rows() const noexcept { return static_cast<int>(values.rows()); }
    int states() const noexcept { return labels.states; }
    int durations() const noexcept { return labels.durations; }

    auto state_block() const { return values.leftCols(labels.states); }
    auto duration_block() const { return values.rightCols(labels.durations); }

    bool operator==(const ParameterMatrix& other) const {
        return labels == other.labels && values.rows() == other.values.rows() &&
               values.cols() == other.values.cols() && values == other.values;
    }
};

}  // namespace mcpflow
