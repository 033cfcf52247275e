#include "adjointkit/inverse.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace adjointkit {

Vector pseudo_inverse_apply(const SvdResult& s, const DenseOperator& op, const Vector& y) {
  if (y.size() != op.rows()) throw InvalidArgument("normal_solve: y is not in the codomain");
  Vector x = Vector::Zero(op.cols());
  for (Index i = 0; i < s.rank; ++i)
    x += (op.codomain().inner(y, s.left_vectors.col(i)) / s.sigma(i)) * s.right_vectors.col(i);
  return x;
}

Vector normal_solve(const DenseOperator& op, const Vector& y) {
  return pseudo_inverse_apply(svd(op), op, y);
}

TikhonovSolution tikhonov_solve(const DenseOperator& op, const Vector& y, double kappa,
                                const Vector& x0) {
  if (!(kappa > 0.0)) throw InvalidArgument("tikhonov_solve: kappa must be positive");
  if (y.size() != op.rows() || x0.size() != op.cols())
    throw InvalidArgument("tikhonov_solve: y or x0 has the wrong length");
  const InnerProductSpace& dom = op.domain();
  const InnerProductSpace& cod = op.codomain();
  const Matrix& a = op.entries();
  const Matrix at_mc = a.transpose() * cod.metric();
  const Matrix system = at_mc * a + kappa * dom.metric();
  const Vector rhs = at_mc * y + kappa * dom.apply_metric(x0);
  Eigen::LLT<Matrix> llt(0.5 * (system + system.transpose()));
  if (llt.info() != Eigen::Success)
    throw NumericalError("tikhonov_solve: regularized system is not positive definite");
  TikhonovSolution out;
  out.x = llt.solve(rhs);
  out.kappa = kappa;
  out.residual_norm = cod.norm(a * out.x - y);
  out.prior_distance = dom.norm(out.x - x0);
  return out;
}

double tikhonov_optimality_residual(const DenseOperator& op, const Vector& y, double kappa,
                                    const Vector& x0, const Vector& x) {
  const DenseOperator star = adjoint(op);
  const Vector lhs = star.apply(op.apply(x)) + kappa * x;
  const Vector rhs = star.apply(y) + kappa * x0;
  return op.domain().norm(lhs - rhs);
}

Penalty tikhonov_penalty(const Vector& z, const Vector& z0, double kappa, double weight) {
  if (kappa < 0.0) throw InvalidArgument("tikhonov_penalty: kappa must be nonnegative");
  if (z.size() != z0.size()) throw InvalidArgument("tikhonov_penalty: length mismatch");
  const Vector d = z - z0;
  return Penalty{0.5 * kappa * weight * d.squaredNorm(), kappa * weight * d};
}

PicardTable picard_diagnostic(const DenseOperator& op, const Vector& y) {
  if (y.size() != op.rows()) throw InvalidArgument("picard_diagnostic: y is not in the codomain");
  const SvdResult s = svd(op);
  const InnerProductSpace& cod = op.codomain();
  PicardTable table;
  double running = 0.0;
  for (Index i = 0; i < s.rank; ++i) {
    PicardRow row;
    row.index = i + 1;
    row.sigma = s.sigma(i);
    row.coeff = std::abs(cod.inner(y, s.left_vectors.col(i)));
    row.ratio = row.coeff / row.sigma;
    running += row.ratio * row.ratio;
    row.cumsum = running;
    table.rows.push_back(row);
  }
  const double ny = cod.norm(y);
  if (ny > 0.0) {
    Vector projection = Vector::Zero(y.size());
    for (Index i = s.rank; i < s.left_vectors.cols(); ++i) {
      const Vector w = s.left_vectors.col(i);
      projection += cod.inner(w, y) * w;
    }
    table.range_defect = cod.norm(projection) / ny;
  }
  return table;
}

double instability_demo(const DenseOperator& op, const Vector& y, Index n_index, double delta) {
  if (delta == 0.0) throw InvalidArgument("instability_demo: delta must be nonzero");
  const SvdResult s = svd(op);
  if (n_index < 1 || n_index > s.rank)
    throw InvalidArgument("instability_demo: N=" + std::to_string(n_index) +
                          " exceeds the numerical rank " + std::to_string(s.rank));
  const Vector perturbed = y + delta * s.left_vectors.col(n_index - 1);
  const Vector x = pseudo_inverse_apply(s, op, y);
  const Vector x_tilde = pseudo_inverse_apply(s, op, perturbed);
  return op.domain().norm(x_tilde - x) / op.codomain().norm(perturbed - y);
}

DenseOperator integration_operator(Index n) {
  if (n < 2) throw InvalidArgument("integration_operator: n must be >= 2");
  const double h = 1.0 / static_cast<double>(n);
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j <= i; ++j) a(i, j) = h;
  const auto space = InnerProductSpace::weighted(Vector::Constant(n, h));
  return DenseOperator(space, space, std::move(a));
}

}  // namespace adjointkit
