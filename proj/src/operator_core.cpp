#include "adjointkit/operator_core.hpp"

#include "adjointkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adjointkit {

namespace {

void require_length(const InnerProductSpace& space, const Vector& x, const char* what) {
  if (x.size() != space.dim()) {
    throw InvalidArgument(std::string(what) + ": vector of length " + std::to_string(x.size()) +
                          " in a space of dimension " + std::to_string(space.dim()));
  }
}

}  // namespace

InnerProductSpace::InnerProductSpace(Index dim) : dim_(dim), euclidean_(true) {
  if (dim < 1) throw InvalidArgument("InnerProductSpace: dimension must be positive");
}

InnerProductSpace::InnerProductSpace(Matrix metric) : dim_(metric.rows()), euclidean_(false) {
  if (metric.rows() != metric.cols() || metric.rows() < 1)
    throw InvalidArgument("InnerProductSpace: metric must be a non-empty square matrix");
  const double scale = metric.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale) || scale == 0.0)
    throw InvalidArgument("InnerProductSpace: metric must be finite and nonzero");
  if ((metric - metric.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("InnerProductSpace: metric is not symmetric");
  auto llt = std::make_shared<Eigen::LLT<Matrix>>(metric);
  if (llt->info() != Eigen::Success)
    throw InvalidArgument("InnerProductSpace: metric is not positive definite");
  euclidean_ = metric.isIdentity(0.0);
  metric_ = std::make_shared<const Matrix>(std::move(metric));
  llt_ = std::move(llt);
}

InnerProductSpace InnerProductSpace::weighted(const Vector& diagonal) {
  return InnerProductSpace(Matrix(diagonal.asDiagonal()));
}

Matrix InnerProductSpace::metric() const {
  return euclidean_ ? Matrix::Identity(dim_, dim_) : *metric_;
}

double InnerProductSpace::inner(const Vector& x, const Vector& y) const {
  require_length(*this, x, "inner");
  require_length(*this, y, "inner");
  return euclidean_ ? x.dot(y) : x.dot(*metric_ * y);
}

double InnerProductSpace::norm(const Vector& x) const {
  return std::sqrt(std::max(0.0, inner(x, x)));
}

Vector InnerProductSpace::apply_metric(const Vector& x) const {
  return euclidean_ ? x : Vector(*metric_ * x);
}

Matrix InnerProductSpace::apply_metric(const Matrix& x) const {
  return euclidean_ ? x : Matrix(*metric_ * x);
}

Vector InnerProductSpace::solve_metric(const Vector& x) const {
  return euclidean_ ? x : Vector(llt_->solve(x));
}

Matrix InnerProductSpace::solve_metric(const Matrix& x) const {
  return euclidean_ ? x : Matrix(llt_->solve(x));
}

Matrix InnerProductSpace::cholesky_factor() const {
  return euclidean_ ? Matrix::Identity(dim_, dim_) : Matrix(llt_->matrixL());
}

bool InnerProductSpace::operator==(const InnerProductSpace& other) const {
  if (dim_ != other.dim_) return false;
  if (euclidean_ && other.euclidean_) return true;
  return metric() == other.metric();
}

double inner(const InnerProductSpace& space, const Vector& x, const Vector& y) {
  return space.inner(x, y);
}

// Argument evaluation order is unspecified, so the dimensions must not be read
// from a matrix that may already have been moved into the third parameter.
DenseOperator::DenseOperator(Matrix entries)
    : domain_(entries.cols()),
      codomain_(entries.rows()),
      entries_(std::move(entries)) {}

DenseOperator::DenseOperator(InnerProductSpace domain, InnerProductSpace codomain, Matrix entries)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), entries_(std::move(entries)) {
  if (entries_.rows() != codomain_.dim() || entries_.cols() != domain_.dim()) {
    throw InvalidArgument("DenseOperator: entries are " + std::to_string(entries_.rows()) + "x" +
                          std::to_string(entries_.cols()) + " but spaces require " +
                          std::to_string(codomain_.dim()) + "x" + std::to_string(domain_.dim()));
  }
}

Vector DenseOperator::apply(const Vector& x) const {
  require_length(domain_, x, "DenseOperator::apply");
  return entries_ * x;
}

DenseOperator adjoint(const DenseOperator& op) {
  Matrix weighted = op.entries().transpose() * op.codomain().metric();
  return DenseOperator(op.codomain(), op.domain(), op.domain().solve_metric(weighted));
}

namespace {

double power_iteration(const DenseOperator& forward, const DenseOperator& backward,
                       int max_iters, double rel_tol) {
  // Largest eigenvalue of backward∘forward, which is self-adjoint and PSD.
  const InnerProductSpace& space = forward.domain();
  Lcg rng(0x5eed);
  Vector x = rng.uniform_vector(space.dim());
  x /= space.norm(x);
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    const Vector y = backward.apply(forward.apply(x));
    const double next = space.inner(x, y);
    const double ny = space.norm(y);
    if (ny == 0.0) return 0.0;
    x = y / ny;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(0.0, lambda));
}

}  // namespace

double operator_norm(const DenseOperator& op, int max_iters, double rel_tol) {
  return power_iteration(op, adjoint(op), max_iters, rel_tol);
}

double operator_norm_via_coadjoint(const DenseOperator& op, int max_iters, double rel_tol) {
  const DenseOperator star = adjoint(op);
  return power_iteration(star, op, max_iters, rel_tol);
}

AdjointReport adjoint_consistency_check(const DenseOperator& op, int trials, std::uint64_t seed) {
  return adjoint_consistency_check(op, adjoint(op), trials, seed);
}

AdjointReport adjoint_consistency_check(const DenseOperator& op, const DenseOperator& candidate,
                                        int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("adjoint_consistency_check: trials must be >= 1");
  if (candidate.rows() != op.cols() || candidate.cols() != op.rows())
    throw InvalidArgument("adjoint_consistency_check: candidate adjoint has the wrong shape");

  const InnerProductSpace& dom = op.domain();
  const InnerProductSpace& cod = op.codomain();
  Lcg rng(seed);
  Matrix u(dom.dim(), trials);
  Matrix v(cod.dim(), trials);
  for (int t = 0; t < trials; ++t) {
    Vector ut = rng.uniform_vector(dom.dim());
    Vector vt = rng.uniform_vector(cod.dim());
    u.col(t) = ut / dom.norm(ut);
    v.col(t) = vt / cod.norm(vt);
  }

  const Vector defects = kernels::adjoint_defects(op.entries(), candidate.entries(),
                                                  dom.metric(), cod.metric(), u, v);
  double scale = operator_norm(op, 2000, 1e-12);
  if (scale == 0.0) scale = 1.0;
  return AdjointReport{trials, defects.maxCoeff() / scale};
}

void normalize_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak == 0.0) return;
  for (Index i = 0; i < v.size(); ++i) {
    // Near-ties resolve to the first index so roundoff cannot flip the choice.
    if (std::abs(v(i)) >= peak * (1.0 - 1e-10)) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

Matrix orthonormalize(const std::vector<Vector>& vectors, const InnerProductSpace& space) {
  Matrix columns(space.dim(), static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != space.dim())
      throw InvalidArgument("orthonormalize: vector length does not match the space");
    columns.col(static_cast<Index>(j)) = vectors[j];
  }
  return orthonormalize(columns, space);
}

Matrix orthonormalize(const Matrix& columns, const InnerProductSpace& space) {
  if (columns.rows() != space.dim())
    throw InvalidArgument("orthonormalize: vector length does not match the space");
  double input_scale = 0.0;
  for (Index j = 0; j < columns.cols(); ++j)
    input_scale = std::max(input_scale, space.norm(columns.col(j)));

  Matrix q = columns;
  for (Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index k = 0; k < j; ++k) {
        const Vector qk = q.col(k);
        q.col(j) -= space.inner(qk, q.col(j)) * qk;
      }
    }
    const double pivot = space.norm(q.col(j));
    if (!(pivot >= 1e-12 * input_scale) || pivot == 0.0)
      throw InvalidArgument("orthonormalize: input vectors are linearly dependent");
    q.col(j) /= pivot;
  }
  return q;
}

}  // namespace adjointkit
