#include "adjointkit/kernels.hpp"

#include <cmath>
#include <exception>

#ifdef ADJOINTKIT_HAVE_OPENMP
#include <omp.h>
#endif

namespace adjointkit::kernels {

int max_threads() {
#ifdef ADJOINTKIT_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

// Block row j of the Kronecker sum: rows j*n .. j*n+n-1.
void fill_kron_block_row(const Matrix& a, Index j, Matrix& out) {
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i) {
    const Index row = i + n * j;
    // (Aᵀ⊗I): coefficient of P(i,k) is A(k,j).
    for (Index k = 0; k < n; ++k) out(row, i + n * k) += a(k, j);
    // (I⊗Aᵀ): coefficient of P(k,j) is A(k,i).
    for (Index k = 0; k < n; ++k) out(row, k + n * j) += a(k, i);
  }
}

double trial_defect(const Matrix& a, const Matrix& a_star, const Matrix& metric_dom,
                    const Matrix& metric_cod, const Matrix& u, const Matrix& v, Index t) {
  const Vector au = a * u.col(t);
  const Vector asv = a_star * v.col(t);
  const double lhs = au.dot(metric_cod * v.col(t));
  const double rhs = u.col(t).dot(metric_dom * asv);
  return std::abs(lhs - rhs);
}

double central_difference(const std::function<double(const Vector&)>& f, const Vector& z,
                          double h, Index j) {
  Vector plus = z;
  Vector minus = z;
  plus(j) += h;
  minus(j) -= h;
  return (f(plus) - f(minus)) / (2.0 * h);
}

void check_square(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("kron_sum_transpose: matrix must be square");
}

}  // namespace

namespace serial {

Matrix kron_sum_transpose(const Matrix& a) {
  check_square(a);
  const Index n = a.rows();
  Matrix out = Matrix::Zero(n * n, n * n);
  for (Index j = 0; j < n; ++j) fill_kron_block_row(a, j, out);
  return out;
}

Vector adjoint_defects(const Matrix& a, const Matrix& a_star, const Matrix& metric_dom,
                       const Matrix& metric_cod, const Matrix& u, const Matrix& v) {
  Vector out(u.cols());
  for (Index t = 0; t < u.cols(); ++t)
    out(t) = trial_defect(a, a_star, metric_dom, metric_cod, u, v, t);
  return out;
}

Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& z,
                        double h) {
  Vector g(z.size());
  for (Index j = 0; j < z.size(); ++j) g(j) = central_difference(f, z, h, j);
  return g;
}

void for_each_index(Index count, const std::function<void(Index)>& body) {
  for (Index i = 0; i < count; ++i) body(i);
}

}  // namespace serial

namespace omp {

Matrix kron_sum_transpose(const Matrix& a) {
  check_square(a);
  const Index n = a.rows();
  Matrix out = Matrix::Zero(n * n, n * n);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) fill_kron_block_row(a, j, out);
  return out;
}

Vector adjoint_defects(const Matrix& a, const Matrix& a_star, const Matrix& metric_dom,
                       const Matrix& metric_cod, const Matrix& u, const Matrix& v) {
  Vector out(u.cols());
#pragma omp parallel for schedule(static)
  for (Index t = 0; t < u.cols(); ++t)
    out(t) = trial_defect(a, a_star, metric_dom, metric_cod, u, v, t);
  return out;
}

Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& z,
                        double h) {
  Vector g(z.size());
  for_each_index(z.size(), [&](Index j) { g(j) = central_difference(f, z, h, j); });
  return g;
}

// Exceptions cannot cross the parallel region; one captured failure is rethrown.
void for_each_index(Index count, const std::function<void(Index)>& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(adjointkit_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace omp

}  // namespace adjointkit::kernels
