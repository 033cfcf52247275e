#pragma once

#include "adjointkit/types.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <memory>
#include <vector>

namespace adjointkit {

/// Finite-dimensional real space with inner product ⟨x, y⟩ = xᵀ M y.
///
/// The metric M must be symmetric (to 1e-12 relative to its largest entry)
/// and positive definite. Its Cholesky factor is computed once and shared
/// between copies; every metric inverse goes through triangular solves.
class InnerProductSpace {
 public:
  /// Euclidean space of the given dimension (M = I).
  explicit InnerProductSpace(Index dim);
  /// Throws InvalidArgument if `metric` is not square, symmetric and SPD.
  explicit InnerProductSpace(Matrix metric);

  static InnerProductSpace weighted(const Vector& diagonal);

  Index dim() const { return dim_; }
  bool is_euclidean() const { return euclidean_; }
  Matrix metric() const;

  double inner(const Vector& x, const Vector& y) const;
  double norm(const Vector& x) const;

  Vector apply_metric(const Vector& x) const;
  Matrix apply_metric(const Matrix& x) const;
  /// M⁻¹ x.
  Vector solve_metric(const Vector& x) const;
  Matrix solve_metric(const Matrix& x) const;
  /// Lower Cholesky factor L with M = L Lᵀ.
  Matrix cholesky_factor() const;

  /// Same dimension and identical metric entries.
  bool operator==(const InnerProductSpace& other) const;

 private:
  Index dim_;
  bool euclidean_;
  std::shared_ptr<const Matrix> metric_;
  std::shared_ptr<const Eigen::LLT<Matrix>> llt_;
};

/// xᵀ M y; throws InvalidArgument on a dimension mismatch.
double inner(const InnerProductSpace& space, const Vector& x, const Vector& y);

/// Linear map between two inner-product spaces, stored densely
/// (codomain.dim rows, domain.dim columns).
class DenseOperator {
 public:
  /// Euclidean domain and codomain.
  explicit DenseOperator(Matrix entries);
  DenseOperator(InnerProductSpace domain, InnerProductSpace codomain, Matrix entries);

  const InnerProductSpace& domain() const { return domain_; }
  const InnerProductSpace& codomain() const { return codomain_; }
  const Matrix& entries() const { return entries_; }
  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }

  Vector apply(const Vector& x) const;

 private:
  InnerProductSpace domain_;
  InnerProductSpace codomain_;
  Matrix entries_;
};

/// A* = M_dom⁻¹ Aᵀ M_cod, with domain and codomain swapped.
DenseOperator adjoint(const DenseOperator& op);

/// ‖A‖ in the two metrics, by power iteration on A*A.
double operator_norm(const DenseOperator& op, int max_iters = 10000, double rel_tol = 1e-15);
/// Same quantity by power iteration on AA* (independent route).
double operator_norm_via_coadjoint(const DenseOperator& op, int max_iters = 10000,
                                   double rel_tol = 1e-15);

struct AdjointReport {
  int trials = 0;
  /// max |⟨Au,v⟩ − ⟨u,A*v⟩| / (‖u‖‖v‖‖A‖) over random pairs.
  double max_defect = 0.0;
};

/// Checks `op` against its constructed adjoint.
AdjointReport adjoint_consistency_check(const DenseOperator& op, int trials,
                                        std::uint64_t seed);
/// Checks `op` against a caller-supplied candidate adjoint, e.g. a hand-derived
/// one or a deliberately corrupted one.
AdjointReport adjoint_consistency_check(const DenseOperator& op, const DenseOperator& candidate,
                                        int trials, std::uint64_t seed);

/// Modified Gram–Schmidt (two passes) in the space's metric. Columns of the
/// result are orthonormal and span the same subspace as the input.
/// Throws InvalidArgument when a pivot norm drops below 1e-12 times the
/// largest input norm.
Matrix orthonormalize(const std::vector<Vector>& vectors, const InnerProductSpace& space);
Matrix orthonormalize(const Matrix& columns, const InnerProductSpace& space);

/// Flips v so that its first entry of largest magnitude is positive.
void normalize_sign(Eigen::Ref<Vector> v);

}  // namespace adjointkit
