#include "adjointkit/pde_models.hpp"

#include "adjointkit/inverse.hpp"
#include "adjointkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace adjointkit::pde {

Vector tridiagonal_solve(const Vector& lower, const Vector& diag, const Vector& upper,
                         const Vector& rhs) {
  const Index n = diag.size();
  if (n < 1 || rhs.size() != n || lower.size() != n - 1 || upper.size() != n - 1)
    throw InvalidArgument("tridiagonal_solve: inconsistent band lengths");
  Vector c_star(n);
  Vector d_star(n);
  const double scale = std::max(diag.cwiseAbs().maxCoeff(), 1e-300);
  double pivot = diag(0);
  if (std::abs(pivot) <= 1e-300 * scale || pivot == 0.0)
    throw NumericalError("tridiagonal_solve: zero pivot at row 0");
  c_star(0) = n > 1 ? upper(0) / pivot : 0.0;
  d_star(0) = rhs(0) / pivot;
  for (Index i = 1; i < n; ++i) {
    pivot = diag(i) - lower(i - 1) * c_star(i - 1);
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw NumericalError("tridiagonal_solve: zero pivot at row " + std::to_string(i));
    c_star(i) = i + 1 < n ? upper(i) / pivot : 0.0;
    d_star(i) = (rhs(i) - lower(i - 1) * d_star(i - 1)) / pivot;
  }
  Vector x(n);
  x(n - 1) = d_star(n - 1);
  for (Index i = n - 1; i-- > 0;) x(i) = d_star(i) - c_star(i) * x(i + 1);
  return x;
}

// ---------------------------------------------------------------------------
// Advection

AdvectionProblem::AdvectionProblem(Index n, double beta) : n_(n), beta_(beta) {
  if (n < 2) throw InvalidArgument("AdvectionProblem: need n >= 2");
  if (!(beta > 0.0)) throw InvalidArgument("AdvectionProblem: beta must be positive");
}

Vector AdvectionProblem::grid() const {
  return Vector::LinSpaced(n_ + 1, 0.0, 1.0);
}

Vector AdvectionProblem::residual(const Vector& u, const Vector& z) const {
  Vector c(n_ + 1);
  c(0) = -beta_ * u(0) - z(0);
  for (Index i = 1; i <= n_; ++i) c(i) = beta_ * (u(i) - u(i - 1));
  return c;
}

Vector AdvectionProblem::solve_forward(const Vector& z) const {
  if (z.size() != 1) throw InvalidArgument("AdvectionProblem: control is a scalar");
  Vector u(n_ + 1);
  u(0) = -z(0) / beta_;
  for (Index i = 1; i <= n_; ++i) u(i) = u(i - 1);
  return u;
}

Vector AdvectionProblem::apply_DuC(const Vector&, const Vector&, const Vector& du) const {
  Vector out(n_ + 1);
  out(0) = -beta_ * du(0);
  for (Index i = 1; i <= n_; ++i) out(i) = beta_ * (du(i) - du(i - 1));
  return out;
}

Vector AdvectionProblem::apply_DzC(const Vector&, const Vector&, const Vector& dz) const {
  Vector out = Vector::Zero(n_ + 1);
  out(0) = -dz(0);
  return out;
}

Vector AdvectionProblem::solve_DuC_adjoint(const Vector&, const Vector&, const Vector& rhs) const {
  // Downwind sweep from the outflow end.
  Vector y(n_ + 1);
  y(n_) = rhs(n_) / beta_;
  for (Index j = n_ - 1; j >= 1; --j) y(j) = y(j + 1) + rhs(j) / beta_;
  y(0) = -y(1) - rhs(0) / beta_;
  return y;
}

Vector AdvectionProblem::apply_DzC_adjoint(const Vector&, const Vector&, const Vector& y) const {
  return Vector::Constant(1, -y(0));
}

double AdvectionProblem::objective(const Vector& u, const Vector&) const {
  return 0.5 * h() * u.tail(n_).squaredNorm();
}

Vector AdvectionProblem::grad_u_f(const Vector& u, const Vector&) const {
  Vector g = h() * u;
  g(0) = 0.0;
  return g;
}

Vector AdvectionProblem::grad_z_f(const Vector&, const Vector&) const {
  return Vector::Zero(1);
}

Vector AdvectionProblem::adjoint_field(const Vector& y) const {
  Vector v(n_ + 1);
  v.head(n_) = y.tail(n_);
  v(n_) = 0.0;
  return v;
}

// ---------------------------------------------------------------------------
// Elliptic

EllipticProblem::EllipticProblem(Index n, double g0, double g1, Vector u_obs, double kappa)
    : n_(n), g0_(g0), g1_(g1), u_obs_(std::move(u_obs)), kappa_(kappa) {
  if (n < 3) throw InvalidArgument("EllipticProblem: need n >= 3");
  if (u_obs_.size() != n) throw InvalidArgument("EllipticProblem: u_obs must have n entries");
  if (kappa < 0.0) throw InvalidArgument("EllipticProblem: kappa must be nonnegative");
}

Vector EllipticProblem::grid() const {
  Vector x(n_);
  for (Index i = 0; i < n_; ++i) x(i) = static_cast<double>(i + 1) * h();
  return x;
}

Vector EllipticProblem::midpoints() const {
  Vector x(n_ + 1);
  for (Index j = 0; j <= n_; ++j) x(j) = (static_cast<double>(j) + 0.5) * h();
  return x;
}

Vector EllipticProblem::with_boundary(const Vector& u) const {
  if (u.size() != n_) throw InvalidArgument("EllipticProblem: state must have n entries");
  Vector ext(n_ + 2);
  ext(0) = g0_;
  ext.segment(1, n_) = u;
  ext(n_ + 1) = g1_;
  return ext;
}

EllipticProblem::Tridiagonal EllipticProblem::stencil(const Vector& z) const {
  if (z.size() != n_ + 1) throw InvalidArgument("EllipticProblem: control must have n+1 entries");
  const Vector k = z.array().exp();
  const double inv_h = 1.0 / h();
  Tridiagonal t{Vector(n_ - 1), Vector(n_), Vector(n_ - 1)};
  for (Index r = 0; r < n_; ++r) t.diag(r) = (k(r) + k(r + 1)) * inv_h;
  for (Index r = 0; r + 1 < n_; ++r) {
    t.upper(r) = -k(r + 1) * inv_h;
    t.lower(r) = -k(r + 1) * inv_h;
  }
  return t;
}

EllipticProblem::Tridiagonal EllipticProblem::adjoint_stencil(const Vector& z) const {
  Tridiagonal t = stencil(z);
  std::swap(t.lower, t.upper);
  return t;
}

namespace {

Matrix dense_tridiagonal(const Vector& lower, const Vector& diag, const Vector& upper) {
  const Index n = diag.size();
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = diag(i);
  for (Index i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = upper(i);
    m(i + 1, i) = lower(i);
  }
  return m;
}

}  // namespace

Matrix EllipticProblem::forward_operator(const Vector& z) const {
  const Tridiagonal t = stencil(z);
  return dense_tridiagonal(t.lower, t.diag, t.upper);
}

Matrix EllipticProblem::adjoint_operator(const Vector& z) const {
  const Tridiagonal t = adjoint_stencil(z);
  return dense_tridiagonal(t.lower, t.diag, t.upper);
}

Vector EllipticProblem::residual(const Vector& u, const Vector& z) const {
  const Vector ext = with_boundary(u);
  const Vector k = z.array().exp();
  Vector c(n_);
  for (Index i = 1; i <= n_; ++i)
    c(i - 1) = (k(i) * (ext(i) - ext(i + 1)) + k(i - 1) * (ext(i) - ext(i - 1))) / h();
  return c;
}

Vector EllipticProblem::solve_forward(const Vector& z) const {
  const Tridiagonal t = stencil(z);
  Vector rhs = Vector::Zero(n_);
  rhs(0) += std::exp(z(0)) * g0_ / h();
  rhs(n_ - 1) += std::exp(z(n_)) * g1_ / h();
  return tridiagonal_solve(t.lower, t.diag, t.upper, rhs);
}

Vector EllipticProblem::apply_DuC(const Vector&, const Vector& z, const Vector& du) const {
  return forward_operator(z) * du;
}

Vector EllipticProblem::apply_DzC(const Vector& u, const Vector& z, const Vector& dz) const {
  const Vector ext = with_boundary(u);
  const Vector k = z.array().exp();
  Vector out(n_);
  for (Index i = 1; i <= n_; ++i)
    out(i - 1) = (k(i) * dz(i) * (ext(i) - ext(i + 1)) +
                  k(i - 1) * dz(i - 1) * (ext(i) - ext(i - 1))) /
                 h();
  return out;
}

Vector EllipticProblem::solve_DuC_adjoint(const Vector&, const Vector& z, const Vector& rhs) const {
  const Tridiagonal t = adjoint_stencil(z);
  return tridiagonal_solve(t.lower, t.diag, t.upper, rhs);
}

Vector EllipticProblem::apply_DzC_adjoint(const Vector& u, const Vector& z, const Vector& y) const {
  const Vector ext = with_boundary(u);
  Vector yext = Vector::Zero(n_ + 2);
  yext.segment(1, n_) = y;
  const double hh = h();
  Vector g(n_ + 1);
  for (Index j = 0; j <= n_; ++j) {
    const double du = (ext(j + 1) - ext(j)) / hh;
    const double dv = (yext(j + 1) - yext(j)) / hh;
    g(j) = std::exp(z(j)) * du * dv * hh;
  }
  return g;
}

double EllipticProblem::objective(const Vector& u, const Vector& z) const {
  double f = 0.5 * h() * (u - u_obs_).squaredNorm();
  if (kappa_ > 0.0) f += tikhonov_penalty(z, Vector::Zero(z.size()), kappa_, h()).value;
  return f;
}

Vector EllipticProblem::grad_u_f(const Vector& u, const Vector&) const {
  return h() * (u - u_obs_);
}

Vector EllipticProblem::grad_z_f(const Vector&, const Vector& z) const {
  if (kappa_ > 0.0) return tikhonov_penalty(z, Vector::Zero(z.size()), kappa_, h()).gradient;
  return Vector::Zero(z.size());
}

// ---------------------------------------------------------------------------

std::unique_ptr<AdvectionProblem> build_advection_problem(Index n, double beta) {
  return std::make_unique<AdvectionProblem>(n, beta);
}

std::unique_ptr<EllipticProblem> build_elliptic_problem(Index n, double g0, double g1,
                                                        const Vector& u_obs, double kappa) {
  return std::make_unique<EllipticProblem>(n, g0, g1, u_obs, kappa);
}

Vector elliptic_reference_control(Index n) {
  Vector z(n + 1);
  const double h = 1.0 / static_cast<double>(n + 1);
  for (Index j = 0; j <= n; ++j) {
    const double x = (static_cast<double>(j) + 0.5) * h;
    z(j) = 0.5 * std::sin(2.0 * std::numbers::pi * x) + 0.3 * x;
  }
  return z;
}

Vector elliptic_reference_data(Index n, double g0, double g1) {
  const EllipticProblem truth(n, g0, g1, Vector::Zero(n));
  return truth.solve_forward(elliptic_reference_control(n));
}

ProblemRegistry builtin_problems() {
  ProblemRegistry registry;
  registry.add("advection", [](const ProblemOptions& o) -> std::unique_ptr<ConstrainedProblem> {
    return build_advection_problem(o.n, o.beta);
  });
  registry.add("elliptic", [](const ProblemOptions& o) -> std::unique_ptr<ConstrainedProblem> {
    return build_elliptic_problem(o.n, o.g0, o.g1, elliptic_reference_data(o.n, o.g0, o.g1),
                                  o.kappa);
  });
  registry.add("lq-toy", [](const ProblemOptions& o) -> std::unique_ptr<ConstrainedProblem> {
    Lcg rng(o.seed);
    return std::make_unique<LinearQuadraticProblem>(
        rng.uniform_matrix(o.n, std::max<Index>(1, o.n / 2)), o.kappa);
  });
  return registry;
}

double discrete_infsup(const DenseOperator& op) {
  const SvdResult s = svd(op);
  return s.sigma(s.sigma.size() - 1);
}

}  // namespace adjointkit::pde
