#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace conebounds {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Anchored cone operations require x0 != 0 for norm regularizers: the tangent
// cone of a norm at its minimizer is all of R^n and the width bounds are
// meaningless there.
struct degenerate_anchor_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Requested operation is not defined for the given structure kind.
struct unsupported_model_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numeric routine (SVD, factorization, ...) failed to produce a usable result.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace conebounds
