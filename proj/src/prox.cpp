#include "mcpflow/prox.hpp"

#include "mcpflow/error.hpp"

namespace mcpflow {

Matrix group_lasso_prox(const Matrix& v, double tau) {
    if (!(tau >= 0.0)) throw InvalidArgument("group_lasso_prox: tau must be >= 0");
    if (!v.allFinite()) throw NumericError("group_lasso_prox: non-finite input");
    Matrix x = v;
    if (tau == 0.0) return x;
    for (Eigen::Index m = 0; m < x.rows(); ++m) {
        const double norm = x.row(m).norm();
        if (norm <= tau)
            x.row(m).setZero();
        else
            x.row(m) *= 1.0 - tau / norm;
    }
    return x;
}

double group_norm(const Matrix& theta) {
    return theta.rowwise().norm().sum();
}

int nonzero_rows(const Matrix& theta) {
    int count = 0;
    for (Eigen::Index m = 0; m < theta.rows(); ++m)
        if ((theta.row(m).array() != 0.0).any()) ++count;
    return count;
}

}  // namespace mcpflow
