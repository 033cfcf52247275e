#pragma once

// Seeded random instances shared by the selftest, the unit tests and the
// acceptance binary.

#include "adjointkit/operator_core.hpp"

namespace adjointkit::gen {

/// SPD matrix LLᵀ + 0.5 I with L uniform in [-1, 1].
Matrix spd_matrix(Lcg& rng, Index n);

/// Random metric: Euclidean, diagonal or full SPD, picked uniformly.
InnerProductSpace mixed_space(Lcg& rng, Index n);

/// Random operator with rows, cols in [1, max_rows] x [1, max_cols] and
/// mixed metrics on both sides.
DenseOperator mixed_operator(Lcg& rng, Index max_rows, Index max_cols);

/// Random rank-deficient matrix: product of m x r and r x n uniform factors,
/// r drawn from [0, min(m, n)].
Matrix low_rank_matrix(Lcg& rng, Index m, Index n);

/// A = S D S⁻¹ with D block diagonal (real eigenvalues and 2x2 rotation
/// blocks), S well conditioned. All real parts are negative when `stable`,
/// at least one is positive otherwise, and |Re λᵢ + Re λⱼ| ≥ 0.1 for every
/// pair so the Lyapunov system stays solvable.
Matrix constructed_matrix(Lcg& rng, Index n, bool stable);

}  // namespace adjointkit::gen
