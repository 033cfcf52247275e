#pragma once

#include "adjointkit/operator_core.hpp"

namespace adjointkit {

/// Eigenpairs of a self-adjoint operator, eigenvalues descending, eigenvectors
/// orthonormal in the operator's metric (one per column).
struct EigResult {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Cyclic Jacobi on a symmetric matrix. Eigenvalues descending; sweeps stop
/// once the off-diagonal Frobenius mass is below 1e-14 ‖S‖_F.
/// Throws NumericalError if that does not happen within 100 sweeps.
EigResult jacobi_eigen_symmetric(const Matrix& symmetric);

/// Spectral decomposition of a self-adjoint operator (domain == codomain).
/// Non-identity metrics M = LLᵀ are handled by diagonalizing L⁻¹(MA)L⁻ᵀ.
/// Throws InvalidArgument if the operator fails the self-adjointness check.
EigResult eig_self_adjoint(const DenseOperator& op);

/// Singular system {σᵢ, uᵢ, vᵢ} with A uᵢ = σᵢ vᵢ and A* vᵢ = σᵢ uᵢ.
struct SvdResult {
  /// min(m, n) values, descending.
  Vector sigma;
  /// u₁..u_n as columns, orthonormal in the domain metric.
  Matrix right_vectors;
  /// v₁..v_m as columns, orthonormal in the codomain metric.
  Matrix left_vectors;
  /// Number of σᵢ strictly above rank_tol.
  Index rank = 0;
  double rank_tol = 0.0;
};

/// Passing a negative rank_tol selects the default 1e-10 σ₁.
inline constexpr double kDefaultRankTol = -1.0;

/// SVD through the normal operator: eigenpairs of A*A give the right
/// vectors, σᵢ = ‖A uᵢ‖, vᵢ = A uᵢ / σᵢ for the retained values, and the
/// remaining left vectors come from the null space of AA*.
/// Each uᵢ is signed so its first entry of largest magnitude is positive.
SvdResult svd(const DenseOperator& op, double rank_tol = kDefaultRankTol);

/// Orthonormal bases for R(A), N(A), R(A*), N(A*).
struct SubspaceBases {
  Matrix range_A;
  Matrix null_A;
  Matrix range_Astar;
  Matrix null_Astar;
};

SubspaceBases fundamental_subspaces(const SvdResult& s);

struct Solvability {
  bool solvable = false;
  /// ‖projection of y onto N(A*)‖ / ‖y‖ (0 for y = 0).
  double defect = 0.0;
};

/// Au = y is solvable iff y ⊥ N(A*).
Solvability solvability_check(const DenseOperator& op, const Vector& y, double tol);

/// P = Σ ⟨·, bᵢ⟩ bᵢ for metric-orthonormal columns bᵢ.
/// Throws InvalidArgument if the basis is not orthonormal to 1e-10.
DenseOperator orthogonal_projector(const Matrix& basis, const InnerProductSpace& space);

}  // namespace adjointkit
