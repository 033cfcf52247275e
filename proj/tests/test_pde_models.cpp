#include "adjointkit/pde_models.hpp"
#include "adjointkit/spectral.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace adjointkit;
using namespace adjointkit::pde;
using testing_util::max_abs_diff;

TEST_SUITE("pde-models") {

TEST_CASE("Thomas algorithm") {
  const Vector rhs = (Vector(4) << 1, 2, 3, 4).finished();
  CHECK(max_abs_diff(tridiagonal_solve(Vector::Zero(3), Vector::Ones(4), Vector::Zero(3), rhs), rhs) == 0.0);
  Lcg rng(227);
  const Index n = 50;
  const Vector x = rng.uniform_vector(n);
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = 2;
    if (i > 0) a(i, i - 1) = -1;
    if (i + 1 < n) a(i, i + 1) = -1;
  }
  const Vector sol = tridiagonal_solve(-Vector::Ones(n - 1), 2 * Vector::Ones(n), -Vector::Ones(n - 1), a * x);
  CHECK(max_abs_diff(sol, x) <= 1e-12 * n * n);
  CHECK((a * sol - a * x).cwiseAbs().maxCoeff() <= 1e-12 * 4.0);
  CHECK(tridiagonal_solve(Vector(0), Vector::Constant(1, 4.0), Vector(0), Vector::Constant(1, 2.0))(0) == 0.5);
  CHECK_THROWS_AS(tridiagonal_solve(Vector::Ones(1), Vector::Zero(2), Vector::Ones(1), Vector::Ones(2)),
                  NumericalError);
  CHECK_THROWS_AS(tridiagonal_solve(Vector::Ones(2), Vector::Ones(2), Vector::Ones(1), Vector::Ones(2)),
                  InvalidArgument);
}

TEST_CASE("advection: constant transport and closed-form gradient") {
  const AdvectionProblem p(16, 2.5);
  const Vector u = p.solve_forward(Vector::Constant(1, 1.5));
  CHECK(max_abs_diff(u, Vector::Constant(17, -1.5 / 2.5)) <= 1e-15);
  CHECK(p.residual(u, Vector::Constant(1, 1.5)).norm() <= 1e-15);
  Lcg rng(229);
  for (int t = 0; t < 10; ++t) {
    const double z = rng.uniform(-3.0, 3.0);
    const double beta = rng.uniform(0.2, 4.0);
    const AdvectionProblem q(rng.uniform_int(2, 64), beta);
    const ReducedGradientReport r = reduced_gradient(q, Vector::Constant(1, z));
    CHECK(std::abs(r.gradient(0) - z / (beta * beta)) <= 1e-10);
    CHECK(r.f_value == doctest::Approx(z * z / (2 * beta * beta)).epsilon(1e-12));
    // Continuous adjoint v(x) = z (1 - x) / β² is reproduced at the nodes.
    const Vector v = q.adjoint_field(r.adjoint);
    const Vector exact = (z / (beta * beta)) * (1.0 - q.grid().array()).matrix();
    CHECK(max_abs_diff(v, exact) <= 1e-10);
  }
  CHECK_THROWS_AS(AdvectionProblem(1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(AdvectionProblem(4, 0.0), InvalidArgument);
}

TEST_CASE("advection: zero control is the optimum") {
  const AdvectionProblem p(8, 1.0);
  const ReducedGradientReport r = reduced_gradient(p, Vector::Zero(1));
  CHECK(r.state.cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.adjoint_field(r.adjoint).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.gradient(0) == 0.0);
}

TEST_CASE("advection: descent at step beta^2 converges fast") {
  for (double beta : {0.5, 1.0, 3.0}) {
    const AdvectionProblem p(10, beta);
    const DescentResult r = gradient_descent(p, Vector::Constant(1, 1.0), beta * beta, 60, 0.0);
    CHECK(std::abs(r.z(0)) <= 1e-8);
    CHECK(r.log.size() <= 61);
  }
}

TEST_CASE("elliptic: harmonic lift for a constant coefficient") {
  const EllipticProblem p(20, 0.0, 1.0, Vector::Zero(20));
  const Vector u = p.solve_forward(Vector::Zero(21));
  CHECK(max_abs_diff(u, p.grid()) <= 1e-12);
  CHECK_THROWS_AS(EllipticProblem(2, 0.0, 1.0, Vector::Zero(2)), InvalidArgument);
  CHECK_THROWS_AS(EllipticProblem(5, 0.0, 1.0, Vector::Zero(4)), InvalidArgument);
}

TEST_CASE("elliptic: stationarity at the true coefficient") {
  const Index n = 31;
  const EllipticProblem p(n, 0.0, 1.0, elliptic_reference_data(n, 0.0, 1.0));
  const ReducedGradientReport r = reduced_gradient(p, elliptic_reference_control(n));
  CHECK(r.gradient.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(r.f_value <= 1e-25);
}

TEST_CASE("elliptic: forward operator is symmetric, adjoint operator equals it") {
  const Index n = 15;
  const EllipticProblem p(n, 0.3, -0.2, Vector::Zero(n));
  Lcg rng(233);
  const Vector z = rng.uniform_vector(n + 1);
  const Matrix fwd = p.forward_operator(z);
  CHECK(max_abs_diff(p.adjoint_operator(z), fwd) == 0.0);
  CHECK(max_abs_diff(fwd, fwd.transpose()) == 0.0);
  CHECK(Eigen::LLT<Matrix>(fwd).info() == Eigen::Success);
  CHECK(max_abs_diff(fwd, assemble_DuC(p, p.solve_forward(z), z)) <= 1e-12 * fwd.norm());
}

TEST_CASE("property: elliptic gradient vs finite differences at n = 31") {
  const Index n = 31;
  const EllipticProblem p(n, 0.0, 1.0, elliptic_reference_data(n, 0.0, 1.0));
  Lcg rng(239);
  for (int t = 0; t < 5; ++t) {
    const Vector z = rng.uniform_vector(n + 1, -1.0, 1.0);
    CHECK(fd_gradient_check(p, z, {1e-5}).rel_errors.front() <= 1e-5);
  }
  const EllipticProblem reg(n, 0.0, 1.0, elliptic_reference_data(n, 0.0, 1.0), 1e-3);
  CHECK(fd_gradient_check(reg, rng.uniform_vector(n + 1), {1e-5}).rel_errors.front() <= 1e-5);
}

TEST_CASE("elliptic: linearization and adjoint-solve consistency") {
  const Index n = 15;
  const EllipticProblem p(n, 0.0, 1.0, Vector::Zero(n));
  Lcg rng(241);
  const Vector z = rng.uniform_vector(n + 1);
  const Vector u = p.solve_forward(z);
  CHECK(adjoint_solve_defect(p, u, z, 10, 3) <= 1e-10);
  CHECK(linearization_defect(p, u, z, 1e-6, 5, 3) <= 1e-6);
  // D_z c against central differences of the residual in z.
  const Vector dz = rng.uniform_vector(n + 1);
  const Vector fd = (p.residual(u, z + 1e-6 * dz) - p.residual(u, z - 1e-6 * dz)) / 2e-6;
  CHECK((fd - p.apply_DzC(u, z, dz)).norm() <= 1e-6 * fd.norm());
  // apply_DzC_adjoint is the transpose of apply_DzC.
  const Vector y = rng.uniform_vector(n);
  CHECK(std::abs(p.apply_DzC(u, z, dz).dot(y) - dz.dot(p.apply_DzC_adjoint(u, z, y))) <= 1e-10);
}

TEST_CASE("elliptic inversion: KKT residuals after descent") {
  const Index n = 15;
  const EllipticProblem p(n, 0.0, 1.0, elliptic_reference_data(n, 0.0, 1.0));
  const Vector z0 = Vector::Zero(n + 1);
  const double scale = reduced_gradient(p, z0).gradient.norm();
  const DescentResult r = gradient_descent(p, z0, 100.0, 20000, 1e-6 * scale);
  REQUIRE(r.converged);
  const ReducedGradientReport fin = reduced_gradient(p, r.z);
  const KktResiduals k = kkt_residuals(p, fin.state, fin.adjoint, r.z);
  CHECK(k.forward <= 1e-6 * scale);
  CHECK(k.adjoint <= 1e-6 * scale);
  CHECK(k.control <= 1e-6 * scale);
}

TEST_CASE("discrete inf-sup") {
  CHECK(discrete_infsup(DenseOperator(Matrix(Matrix::Identity(4, 4)))) == doctest::Approx(1.0));
  Matrix s(2, 2);
  s << 1, 2, 1, 2;
  const DenseOperator singular(s);
  CHECK(discrete_infsup(singular) <= svd(singular).rank_tol);
  const Index n = 15;
  const EllipticProblem p(n, 0.0, 1.0, Vector::Zero(n));
  const double base = discrete_infsup(DenseOperator(p.forward_operator(Vector::Zero(n + 1))));
  CHECK(base > 0.0);
  const double scaled =
      discrete_infsup(DenseOperator(p.forward_operator(Vector::Constant(n + 1, std::log(3.0)))));
  CHECK(scaled == doctest::Approx(3.0 * base).epsilon(1e-10));
}

}  // TEST_SUITE
