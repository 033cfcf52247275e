#pragma once

#include "adjointkit/spectral.hpp"

#include <vector>

namespace adjointkit {

/// Minimum-norm least-squares solution x = Σ_{i≤r} σᵢ⁻¹ ⟨y, vᵢ⟩ uᵢ.
Vector normal_solve(const DenseOperator& op, const Vector& y);
/// Same, reusing an existing decomposition.
Vector pseudo_inverse_apply(const SvdResult& s, const DenseOperator& op, const Vector& y);

struct TikhonovSolution {
  Vector x;
  double kappa = 0.0;
  /// ‖Ax − y‖ in the codomain metric.
  double residual_norm = 0.0;
  /// ‖x − x₀‖ in the domain metric.
  double prior_distance = 0.0;
};

/// Solves (A*A + κI) x = A*y + κx₀ by Cholesky of the metric-weighted
/// system Aᵀ M_cod A + κ M_dom. Throws InvalidArgument for κ ≤ 0.
TikhonovSolution tikhonov_solve(const DenseOperator& op, const Vector& y, double kappa,
                                const Vector& x0);

/// ‖(A*A + κI)x − (A*y + κx₀)‖ in the domain metric.
double tikhonov_optimality_residual(const DenseOperator& op, const Vector& y, double kappa,
                                    const Vector& x0, const Vector& x);

/// κ/2 · weight · ‖z − z₀‖² and its gradient; the penalty term the PDE
/// inversions add when regularized.
struct Penalty {
  double value = 0.0;
  Vector gradient;
};
Penalty tikhonov_penalty(const Vector& z, const Vector& z0, double kappa, double weight);

struct PicardRow {
  Index index = 0;  // 1-based
  double sigma = 0.0;
  double coeff = 0.0;
  double ratio = 0.0;
  double cumsum = 0.0;
};

struct PicardTable {
  std::vector<PicardRow> rows;
  /// Component of y in N(A*), relative to ‖y‖.
  double range_defect = 0.0;
};

/// One row per retained singular value: |⟨y, vᵢ⟩|, its ratio to σᵢ and the
/// running sum of squared ratios.
PicardTable picard_diagnostic(const DenseOperator& op, const Vector& y);

/// Perturbs y by δ v_N (N is 1-based) and returns ‖x̃ − x‖ / ‖ỹ − y‖ for the
/// least-squares solutions, which equals 1/σ_N.
/// Throws InvalidArgument if N is outside 1..rank or δ = 0.
double instability_demo(const DenseOperator& op, const Vector& y, Index n_index, double delta);

/// x ↦ ∫₀ᵗ x(s) ds on a uniform grid of (0,1) with h = 1/n: x sampled at cell
/// midpoints, y at right cell edges, entries h·[i ≥ j]. Both spaces carry the
/// metric h·I so inner products approximate L²(0,1). Requires n ≥ 2.
DenseOperator integration_operator(Index n);

}  // namespace adjointkit
