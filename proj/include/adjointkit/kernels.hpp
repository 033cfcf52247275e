#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial::` is the
// reference used by the tests, `omp::` is the OpenMP variant. Both write
// disjoint outputs and defer any reduction to a fixed serial order, so the two
// variants return bitwise-identical results.

#include "adjointkit/types.hpp"

#include <functional>

namespace adjointkit::kernels {

/// Number of threads the OpenMP variants will use (1 without OpenMP).
int max_threads();

namespace serial {

/// Aᵀ⊗I + I⊗Aᵀ, the matrix of P ↦ PA + AᵀP acting on column-major vec(P).
Matrix kron_sum_transpose(const Matrix& a);

/// Column t of `u`/`v` is a trial pair; returns
/// |⟨A u_t, v_t⟩_cod − ⟨u_t, A* v_t⟩_dom| per trial.
Vector adjoint_defects(const Matrix& a, const Matrix& a_star, const Matrix& metric_dom,
                       const Matrix& metric_cod, const Matrix& u, const Matrix& v);

/// Central differences of f along every canonical direction.
Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& z,
                        double h);

/// Calls body(i) for i in [0, count).
void for_each_index(Index count, const std::function<void(Index)>& body);

}  // namespace serial

namespace omp {

Matrix kron_sum_transpose(const Matrix& a);
Vector adjoint_defects(const Matrix& a, const Matrix& a_star, const Matrix& metric_dom,
                       const Matrix& metric_cod, const Matrix& u, const Matrix& v);
/// `f` must be safe to call concurrently.
Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& z,
                        double h);
void for_each_index(Index count, const std::function<void(Index)>& body);

}  // namespace omp

// Default dispatch used by the library.
using omp::adjoint_defects;
using omp::central_gradient;
using omp::for_each_index;
using omp::kron_sum_transpose;

}  // namespace adjointkit::kernels
