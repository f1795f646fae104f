#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dirl/regularizer.hpp"

namespace dirl {

struct PropertyResult {
  std::string name;
  bool passed = false;
  /// Counterexample or summary numbers.
  std::string detail;
  double seconds = 0.0;
};

/// The five built-in families at a spread of parameters.
std::vector<Regularizer> reference_regularizers();

/// Central differences of value vs derivative and derivative vs second
/// derivative at 100 random t in [0.1, 10] per regularizer.
PropertyResult check_derivative_consistency(const std::vector<Regularizer>& regs, std::uint64_t seed);
PropertyResult check_concavity(const std::vector<Regularizer>& regs, std::uint64_t seed);
PropertyResult check_monotone_weight(const std::vector<Regularizer>& regs, std::uint64_t seed);
/// lipschitz_at_zero == false iff r'(10^-k), k = 1..12, keeps growing.
PropertyResult check_classification_consistency(const std::vector<Regularizer>& regs);
/// check_assumption4 holds exactly for LPN.
PropertyResult check_assumption4_split(const std::vector<Regularizer>& regs);

/// |S_w1(z1) - S_w2(z2)| <= |z1 - z2| + |w1 - w2| + 1e-12 over random tuples.
PropertyResult check_nonexpansiveness(std::size_t tuples, Index dim, std::uint64_t seed);

/// Descent and the telescoped bound on runs of both algorithms.
PropertyResult check_descent_telescope(std::uint64_t seed);

/// Analytic vs central-difference DT at 20 smooth points per algorithm.
PropertyResult check_jacobian_fd(std::uint64_t seed, std::size_t points = 20);

/// M = V diag(l) V' within 1e-8 |M| on random symmetric matrices up to 50 x 50.
PropertyResult check_eigen_reconstruction(std::uint64_t seed, std::size_t matrices = 100);

/// sign(lambda_min(P^-1/2 H P^-1/2)) == sign(lambda_min(H)) for positive diagonal P.
PropertyResult check_sign_preservation(std::uint64_t seed, std::size_t trials = 100);

/// Every suite at its fixed seed.
std::vector<PropertyResult> run_selfcheck(std::uint64_t seed = 20240601);

void print_results(std::ostream& out, const std::vector<PropertyResult>& results);

}  // namespace dirl
