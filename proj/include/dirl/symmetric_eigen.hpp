#pragma once

#include "dirl/types.hpp"

namespace dirl {

struct EigenDecomposition {
  /// Ascending.
  Vector values;
  /// Orthogonal; column j pairs with values[j].
  Matrix vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// 1e-12 * |M|_F. Throws ArgumentError if M is not symmetric within
/// 1e-10 * max(1, |M|_max) and NumericalFailure after 100 sweeps.
EigenDecomposition symmetric_eigen(const Matrix& M);

}  // namespace dirl
