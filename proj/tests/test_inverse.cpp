#include "adjointkit/generators.hpp"
#include "adjointkit/inverse.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace adjointkit;
using testing_util::max_abs_diff;

TEST_SUITE("inverse-ls") {

TEST_CASE("normal_solve recovers x for an invertible system") {
  Lcg rng(61);
  const Matrix a = rng.uniform_matrix(4, 4) + 3.0 * Matrix::Identity(4, 4);
  const Vector x = rng.uniform_vector(4);
  CHECK(max_abs_diff(normal_solve(DenseOperator(a), a * x), x) <= 1e-10);
}

TEST_CASE("normal_solve on the singular 2x2 returns the minimum-norm minimizer") {
  Matrix a(2, 2);
  a << 1, 2, 1, 2;
  const Vector y = Vector::Unit(2, 0);
  const Vector x = normal_solve(DenseOperator(a), y);
  CHECK(max_abs_diff(a.transpose() * a * x, a.transpose() * y) <= 1e-12);
  // Minimum norm: x ⊥ N(A) = span([2,-1]).
  CHECK(std::abs(2.0 * x(0) - x(1)) <= 1e-12);
  CHECK(x(0) == doctest::Approx(0.1));
  CHECK(x(1) == doctest::Approx(0.2));
}

TEST_CASE("overdetermined line fit through exact points") {
  Matrix a(3, 2);
  a << 1, 0, 1, 1, 1, 2;
  const Vector y = (Vector(3) << 1, 3, 5).finished();
  const Vector c = normal_solve(DenseOperator(a), y);
  CHECK(c(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("property: least-squares residual is orthogonal to the range") {
  Lcg rng(67);
  for (int t = 0; t < 10; ++t) {
    const DenseOperator op = gen::mixed_operator(rng, 9, 6);
    const Vector y = rng.uniform_vector(op.rows());
    const Vector r = op.apply(normal_solve(op, y)) - y;
    for (int k = 0; k < 20; ++k) {
      const Vector w = rng.uniform_vector(op.cols());
      CHECK(std::abs(op.codomain().inner(r, op.apply(w))) <= 1e-9);
    }
  }
}

TEST_CASE("property: normal_solve equals a dense normal-equation oracle at full column rank") {
  Lcg rng(71);
  for (int t = 0; t < 10; ++t) {
    const Index n = rng.uniform_int(1, 6);
    const Index m = n + rng.uniform_int(0, 5);
    const Matrix a = rng.uniform_matrix(m, n);
    const Vector y = rng.uniform_vector(m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * a);
    const Vector lam = es.eigenvalues();
    const Vector inv = lam.unaryExpr([&](double l) { return l > 1e-12 * lam.maxCoeff() ? 1.0 / l : 0.0; });
    const Vector oracle = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() *
                          a.transpose() * y;
    CHECK(max_abs_diff(normal_solve(DenseOperator(a), y), oracle) <= 1e-8);
  }
}

TEST_CASE("Tikhonov limits and optimality") {
  Lcg rng(73);
  const Matrix a = rng.uniform_matrix(5, 4) + Matrix::Identity(5, 4);
  const DenseOperator op(a);
  const Vector y = rng.uniform_vector(5);
  const Vector x0 = rng.uniform_vector(4);
  const TikhonovSolution big = tikhonov_solve(op, y, 1e8, x0);
  CHECK((big.x - x0).norm() <= 1e-6 * x0.norm());
  const TikhonovSolution tiny = tikhonov_solve(op, y, 1e-12, x0);
  CHECK((tiny.x - normal_solve(op, y)).norm() <= 1e-6);
  CHECK_THROWS_AS(tikhonov_solve(op, y, 0.0, x0), InvalidArgument);
  CHECK_THROWS_AS(tikhonov_solve(op, y, -1.0, x0), InvalidArgument);
}

TEST_CASE("property: Tikhonov optimality residual and stability bound") {
  Lcg rng(79);
  for (int t = 0; t < 20; ++t) {
    const DenseOperator op = gen::mixed_operator(rng, 8, 8);
    const Vector y = rng.uniform_vector(op.rows());
    const Vector x0 = rng.uniform_vector(op.cols());
    const double kappa = std::pow(10.0, rng.uniform(-6.0, 1.0));
    const TikhonovSolution s = tikhonov_solve(op, y, kappa, x0);
    const double na = operator_norm(op);
    CHECK(tikhonov_optimality_residual(op, y, kappa, x0, s.x) <=
          1e-10 * (na * na + kappa) * std::max(op.domain().norm(s.x), 1.0));
    CHECK(op.domain().norm(s.x) <=
          (na * op.codomain().norm(y) + kappa * op.domain().norm(x0)) / kappa * (1.0 + 1e-12) +
              op.domain().norm(x0));
    CHECK(s.kappa == kappa);
  }
}

TEST_CASE("Tikhonov stays bounded where the unregularized solve amplifies noise") {
  // Deterministic noise of size 1e-3 along the smallest left singular vector.
  const DenseOperator op = integration_operator(64);
  const SvdResult s = svd(op);
  const Vector grid = Vector::LinSpaced(64, 0.5 / 64, 1.0 - 0.5 / 64);
  const Vector y = op.apply(grid.array().sin().matrix());
  const Vector noise = 1e-3 * s.left_vectors.col(s.rank - 1);
  const Vector yn = y + noise;
  const Vector zero = Vector::Zero(64);
  const double kappa = 0.1;
  const double normal_dev = op.domain().norm(normal_solve(op, yn) - normal_solve(op, y));
  const double tik_dev = op.domain().norm(tikhonov_solve(op, yn, kappa, zero).x -
                                          tikhonov_solve(op, y, kappa, zero).x);
  CHECK(normal_dev / tik_dev >= 1e3);
  CHECK(tik_dev <= 1e-3 / (2.0 * std::sqrt(kappa)));
}

TEST_CASE("Picard table on smooth data decays") {
  const DenseOperator op = integration_operator(64);
  const Vector t = Vector::LinSpaced(64, 0.5 / 64, 1.0 - 0.5 / 64);
  const Vector y = op.apply((t.array() * (1.0 - t.array())).matrix());
  const PicardTable table = picard_diagnostic(op, y);
  REQUIRE(table.rows.size() == 64);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    CHECK(table.rows[i].sigma <= table.rows[i - 1].sigma);
    CHECK(table.rows[i].cumsum >= table.rows[i - 1].cumsum);
  }
  CHECK(table.rows[0].index == 1);
  CHECK(table.rows.back().ratio < table.rows[0].ratio);
  CHECK(table.rows.back().cumsum - table.rows[31].cumsum <= 1e-3 * table.rows.back().cumsum);
  CHECK(table.range_defect <= 1e-12);
}

TEST_CASE("Picard table collapses on a singular vector and vanishes on N(A*)") {
  const DenseOperator op = integration_operator(16);
  const SvdResult s = svd(op);
  const PicardTable one = picard_diagnostic(op, s.left_vectors.col(15));
  for (std::size_t i = 0; i + 1 < one.rows.size(); ++i) CHECK(one.rows[i].coeff <= 1e-12);
  CHECK(one.rows.back().ratio == doctest::Approx(1.0 / s.sigma(15)).epsilon(1e-10));

  Matrix a(2, 2);
  a << 1, 2, 1, 2;
  const Vector in_null = (Vector(2) << 1, -1).finished();
  const PicardTable none = picard_diagnostic(DenseOperator(a), in_null);
  for (const auto& r : none.rows) CHECK(r.coeff <= 1e-12);
  CHECK(none.range_defect == doctest::Approx(1.0));
}

TEST_CASE("instability demo") {
  const DenseOperator op = integration_operator(64);
  const SvdResult s = svd(op);
  const Vector y = Vector::Ones(64);
  CHECK(instability_demo(op, y, 1, 1e-3) == doctest::Approx(1.0 / s.sigma(0)).epsilon(1e-6));
  const double amp_r = instability_demo(op, y, s.rank, 1e-3);
  CHECK(amp_r == doctest::Approx(1.0 / s.sigma(s.rank - 1)).epsilon(1e-6));
  // Independent of δ up to the cancellation in x̃ − x, about ε‖x‖/δ.
  CHECK(std::abs(instability_demo(op, y, s.rank, 1e-6) - amp_r) <= 1e-8 * amp_r);
  CHECK_THROWS_AS(instability_demo(op, y, s.rank + 1, 1e-3), InvalidArgument);
  for (Index n : {32, 64}) {
    const DenseOperator opn = integration_operator(n);
    const SvdResult sn = svd(opn);
    CHECK(instability_demo(opn, Vector::Ones(n), sn.rank, 1e-3) >=
          10.0 * instability_demo(opn, Vector::Ones(n), 1, 1e-3));
  }
}

TEST_CASE("integration operator") {
  const DenseOperator op2 = integration_operator(2);
  const Vector y = op2.apply(Vector::Ones(2));
  CHECK(y(0) == doctest::Approx(0.5));
  CHECK(y(1) == doctest::Approx(1.0));
  CHECK(op2.apply(Vector::Zero(2)).norm() == 0.0);
  CHECK_THROWS_AS(integration_operator(1), InvalidArgument);
  double previous = 0.0;
  for (Index n : {16, 32, 64}) {
    const SvdResult s = svd(integration_operator(n));
    const double cond = s.sigma(0) / s.sigma(n - 1);
    CHECK(cond > previous);
    previous = cond;
  }
  const SvdResult s64 = svd(integration_operator(64));
  CHECK(s64.sigma(0) == doctest::Approx(0.6416).epsilon(1e-3));
  CHECK(s64.sigma(63) == doctest::Approx(0.0078148).epsilon(1e-4));
}

TEST_CASE("penalty value and gradient") {
  const Vector z = (Vector(2) << 1, 2).finished();
  const Penalty p = tikhonov_penalty(z, Vector::Zero(2), 0.5, 0.1);
  CHECK(p.value == doctest::Approx(0.5 * 0.5 * 0.1 * 5.0));
  CHECK(max_abs_diff(p.gradient, 0.5 * 0.1 * z) <= 1e-15);
}

}  // TEST_SUITE
