#include "adjointkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace adjointkit {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

std::vector<Index> descending_order(const Vector& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) > values(b); });
  return order;
}

// Eigenpairs of the operator whose metric-weighted Gram form is `gram`
// (gram = M A, symmetric). Vectors come back M-orthonormal.
EigResult eig_from_gram(const Matrix& gram, const InnerProductSpace& space) {
  const Matrix sym = 0.5 * (gram + gram.transpose());
  if (space.is_euclidean()) return jacobi_eigen_symmetric(sym);

  const Matrix l = space.cholesky_factor();
  const auto lower = l.triangularView<Eigen::Lower>();
  // S = L⁻¹ G L⁻ᵀ.
  Matrix half = lower.solve(sym);
  Matrix s = lower.solve(half.transpose());
  s = 0.5 * (s + s.transpose());
  EigResult eig = jacobi_eigen_symmetric(s);
  eig.eigenvectors = l.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors);
  return eig;
}

}  // namespace

EigResult jacobi_eigen_symmetric(const Matrix& symmetric) {
  if (symmetric.rows() != symmetric.cols())
    throw InvalidArgument("jacobi_eigen_symmetric: matrix must be square");
  const Index n = symmetric.rows();
  Matrix a = symmetric;
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();

  constexpr int kMaxSweeps = 100;
  bool converged = scale == 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    if (off_diagonal_norm(a) < 1e-14 * scale) {
      converged = true;
      break;
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && off_diagonal_norm(a) >= 1e-14 * scale)
    throw NumericalError("jacobi_eigen_symmetric: no convergence within 100 sweeps");

  const Vector diag = a.diagonal();
  const auto order = descending_order(diag);
  EigResult out{Vector(n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = diag(order[static_cast<std::size_t>(i)]);
    out.eigenvectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

EigResult eig_self_adjoint(const DenseOperator& op) {
  if (op.rows() != op.cols() || !(op.domain() == op.codomain()))
    throw InvalidArgument("eig_self_adjoint: operator must map a space to itself");
  if (adjoint_consistency_check(op, op, 20, kDefaultSeed).max_defect > 1e-8)
    throw InvalidArgument("eig_self_adjoint: operator is not self-adjoint in its metric");
  EigResult eig = eig_from_gram(op.domain().apply_metric(op.entries()), op.domain());
  for (Index i = 0; i < eig.eigenvectors.cols(); ++i) normalize_sign(eig.eigenvectors.col(i));
  return eig;
}

SvdResult svd(const DenseOperator& op, double rank_tol) {
  const InnerProductSpace& dom = op.domain();
  const InnerProductSpace& cod = op.codomain();
  const Matrix& a = op.entries();
  const Index m = op.rows();
  const Index n = op.cols();

  // Right vectors from A*A; its Gram form is Aᵀ M_cod A.
  const EigResult normal = eig_from_gram(a.transpose() * cod.apply_metric(a), dom);

  // σᵢ = ‖A uᵢ‖ stays accurate for tiny singular values, where sqrt(λᵢ) would
  // only resolve down to about sqrt(eps) σ₁.
  Vector norms(n);
  for (Index i = 0; i < n; ++i) norms(i) = cod.norm(a * normal.eigenvectors.col(i));
  const auto order = descending_order(norms);

  SvdResult out;
  out.right_vectors.resize(n, n);
  Vector all_sigma(n);
  for (Index i = 0; i < n; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    all_sigma(i) = norms(src);
    out.right_vectors.col(i) = normal.eigenvectors.col(src);
    normalize_sign(out.right_vectors.col(i));
  }

  const double sigma_max = n > 0 ? all_sigma(0) : 0.0;
  out.rank_tol = rank_tol < 0.0 ? 1e-10 * sigma_max : rank_tol;
  const Index k = std::min(m, n);
  out.sigma = all_sigma.head(k);
  out.rank = 0;
  while (out.rank < k && out.sigma(out.rank) > out.rank_tol) ++out.rank;

  out.left_vectors.resize(m, m);
  for (Index i = 0; i < out.rank; ++i)
    out.left_vectors.col(i) = a * out.right_vectors.col(i) / out.sigma(i);

  if (out.rank < m) {
    // Complete with the null space of AA*, whose Gram form is M_cod A M_dom⁻¹ Aᵀ M_cod.
    const Matrix mca = cod.apply_metric(a);
    const Matrix gram = mca * dom.solve_metric(Matrix(mca.transpose()));
    const EigResult co = eig_from_gram(gram, cod);
    Matrix candidates(m, m);
    candidates << out.left_vectors.leftCols(out.rank), co.eigenvectors.rightCols(m - out.rank);
    const Matrix q = orthonormalize(candidates, cod);
    for (Index i = out.rank; i < m; ++i) {
      out.left_vectors.col(i) = q.col(i);
      normalize_sign(out.left_vectors.col(i));
    }
  }
  return out;
}

SubspaceBases fundamental_subspaces(const SvdResult& s) {
  const Index r = s.rank;
  const Index n = s.right_vectors.cols();
  const Index m = s.left_vectors.cols();
  return SubspaceBases{s.left_vectors.leftCols(r), s.right_vectors.rightCols(n - r),
                       s.right_vectors.leftCols(r), s.left_vectors.rightCols(m - r)};
}

Solvability solvability_check(const DenseOperator& op, const Vector& y, double tol) {
  if (y.size() != op.rows())
    throw InvalidArgument("solvability_check: y is not in the codomain");
  const InnerProductSpace& cod = op.codomain();
  const double ny = cod.norm(y);
  if (ny == 0.0) return Solvability{true, 0.0};
  const SubspaceBases bases = fundamental_subspaces(svd(op));
  Vector projection = Vector::Zero(y.size());
  for (Index i = 0; i < bases.null_Astar.cols(); ++i) {
    const Vector w = bases.null_Astar.col(i);
    projection += cod.inner(w, y) * w;
  }
  const double defect = cod.norm(projection) / ny;
  return Solvability{defect <= tol, defect};
}

DenseOperator orthogonal_projector(const Matrix& basis, const InnerProductSpace& space) {
  if (basis.rows() != space.dim())
    throw InvalidArgument("orthogonal_projector: basis vectors do not live in the space");
  const Matrix gram = basis.transpose() * space.apply_metric(basis);
  if (basis.cols() > 0 &&
      (gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidArgument("orthogonal_projector: basis is not orthonormal");
  const Matrix p = basis * (basis.transpose() * space.apply_metric(
                                                    Matrix(Matrix::Identity(space.dim(), space.dim()))));
  return DenseOperator(space, space, p);
}

}  // namespace adjointkit
