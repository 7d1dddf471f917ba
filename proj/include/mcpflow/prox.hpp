#pragma once

#include "mcpflow/parameter_matrix.hpp"

namespace mcpflow {

// Row-wise block soft threshold, the exact minimiser of
//   1/2 ||V - X||_F^2 + tau * sum_m ||X_m||_2.
Matrix group_lasso_prox(const Matrix& v, double tau);

// sum_m ||Theta_m||_2
double group_norm(const Matrix& theta);

int nonzero_rows(const Matrix& theta);

}  // namespace mcpflow
