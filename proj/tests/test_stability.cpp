#include "adjointkit/generators.hpp"
#include "adjointkit/stability.hpp"
#include "test_helpers.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace adjointkit;
using namespace adjointkit::stability;
using testing_util::max_abs_diff;

namespace {

// P = ∫₀^T X dt with X' = AᵀX + XA, X(0) = Q, integrated by classical RK4.
Matrix lyapunov_quadrature(const Matrix& a, const Matrix& q, double t_end, double dt) {
  const auto rhs = [&a](const Matrix& x) -> Matrix { return a.transpose() * x + x * a; };
  Matrix x = q;
  Matrix p = Matrix::Zero(q.rows(), q.cols());
  const int steps = static_cast<int>(std::lround(t_end / dt));
  for (int s = 0; s < steps; ++s) {
    const Matrix k1 = rhs(x);
    const Matrix k2 = rhs(x + 0.5 * dt * k1);
    const Matrix k3 = rhs(x + 0.5 * dt * k2);
    const Matrix k4 = rhs(x + dt * k3);
    // P' = X shares the stages of X.
    p += dt / 6.0 * (x + 2.0 * (x + 0.5 * dt * k1) + 2.0 * (x + 0.5 * dt * k2) + (x + dt * k3));
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

double spectral_radius_oracle(const Matrix& k) {
  Eigen::EigenSolver<Matrix> es(k);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("ode-stability") {

TEST_CASE("Lyapunov closed forms") {
  CHECK(max_abs_diff(lyapunov_solve(-Matrix::Identity(3, 3), Matrix::Identity(3, 3)),
                     0.5 * Matrix::Identity(3, 3)) <= 1e-14);
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << -1, -2;
  Matrix p = Matrix::Zero(2, 2);
  p.diagonal() << 0.5, 0.25;
  CHECK(max_abs_diff(lyapunov_solve(a, Matrix::Identity(2, 2)), p) <= 1e-14);
}

TEST_CASE("Lyapunov solution matches the integral quadrature") {
  Matrix a(2, 2);
  a << 0, 1, -1, -1;
  const Matrix p = lyapunov_solve(a, Matrix::Identity(2, 2));
  CHECK(max_abs_diff(p, lyapunov_quadrature(a, Matrix::Identity(2, 2), 60.0, 1e-3)) <= 1e-6);
  CHECK(max_abs_diff(p, (Matrix(2, 2) << 1.5, 0.5, 0.5, 1.0).finished()) <= 1e-12);
}

TEST_CASE("Lyapunov input validation and singular systems") {
  CHECK_THROWS_AS(lyapunov_solve(Matrix::Zero(2, 3), Matrix::Identity(2, 2)), InvalidArgument);
  CHECK_THROWS_AS(lyapunov_solve(-Matrix::Identity(2, 2), -Matrix::Identity(2, 2)), InvalidArgument);
  CHECK_THROWS_AS(lyapunov_solve(-Matrix::Identity(65, 65), Matrix::Identity(65, 65)), InvalidArgument);
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  CHECK_THROWS_AS(lyapunov_solve(rot, Matrix::Identity(2, 2)), NumericalError);
}

TEST_CASE("Hurwitz checks") {
  CHECK(hurwitz_check(-Matrix::Identity(4, 4)).hurwitz);
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  const RouthResult r = hurwitz_check(rot);
  CHECK_FALSE(r.hurwitz);
  CHECK(r.boundary);
  Lcg rng(191);
  const Matrix s = Matrix::Identity(3, 3) + 0.3 * rng.uniform_matrix(3, 3);
  const Matrix a = s * Vector(Vector::LinSpaced(3, -1, -3)).asDiagonal() * s.inverse();
  CHECK(hurwitz_check(a).hurwitz);
  CHECK_FALSE(hurwitz_check(Matrix::Identity(2, 2)).hurwitz);
}

TEST_CASE("characteristic polynomial of a companion-like matrix") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 1, 2, 3;
  const Vector c = characteristic_polynomial(a);
  // (λ-1)(λ-2)(λ-3) = λ³ - 6λ² + 11λ - 6
  CHECK(max_abs_diff(c, (Vector(4) << 1, -6, 11, -6).finished()) <= 1e-12);
}

TEST_CASE("Routh table on explicit polynomials") {
  CHECK(routh_hurwitz((Vector(4) << 1, 6, 11, 6).finished()).hurwitz);
  CHECK_FALSE(routh_hurwitz((Vector(4) << 1, -6, 11, -6).finished()).hurwitz);
  // s³ + s² + s + 1 has roots ±i.
  CHECK(routh_hurwitz((Vector(4) << 1, 1, 1, 1).finished()).boundary);
}

TEST_CASE("property: Routh-Hurwitz agrees with the Lyapunov certificate") {
  Lcg rng(193);
  int disagreements = 0;
  for (int t = 0; t < 50; ++t) {
    const Index n = rng.uniform_int(1, 6);
    const bool stable = t % 2 == 0;
    const Matrix a = gen::constructed_matrix(rng, n, stable);
    const bool routh = hurwitz_check(a).hurwitz;
    bool certified = false;
    try {
      const Matrix p = lyapunov_solve(a, Matrix::Identity(n, n));
      CHECK(lyapunov_residual(a, p, Matrix::Identity(n, n)) <= 1e-9 * std::sqrt(double(n)));
      certified = is_spd(p);
    } catch (const NumericalError&) {
    }
    if (routh != certified || routh != stable) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("linearization") {
  Lcg rng(197);
  const Matrix m = rng.uniform_matrix(3, 3);
  const VectorField lin = [&m](const Vector& x) -> Vector { return m * x; };
  CHECK(max_abs_diff(linearize(lin, Vector::Zero(3)), m) <= 1e-10);
  const VectorField logi = models::logistic();
  CHECK(linearize(logi, Vector::Zero(1))(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(linearize(logi, Vector::Ones(1))(0, 0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK_THROWS_AS(linearize(logi, Vector::Constant(1, 0.5)), InvalidArgument);
}

TEST_CASE("R0 examples") {
  CHECK(r0(0.6 * Matrix::Identity(2, 2), 0.2 * Matrix::Identity(2, 2)).r0 ==
        doctest::Approx(3.0).epsilon(1e-10));
  for (auto [beta, gamma] : {std::pair{0.3, 0.1}, std::pair{0.05, 0.2}, std::pair{1.2, 0.7}}) {
    Matrix f = Matrix::Zero(2, 2);
    f(0, 1) = beta;
    Matrix v(2, 2);
    v << 0.4, 0, -0.4, gamma;
    CHECK(std::abs(r0(f, v).r0 - beta / gamma) <= 1e-8 * beta / gamma);
  }
  CHECK(r0(Matrix::Zero(2, 2), Matrix::Identity(2, 2)).r0 == 0.0);
  CHECK_THROWS_AS(r0(Matrix::Identity(2, 2), Matrix::Zero(2, 2)), NumericalError);
}

TEST_CASE("R0 warns on a negative next-generation matrix") {
  Matrix f(2, 2);
  f << 1, 0, 0, 1;
  Matrix v(2, 2);
  v << 1, 0.5, 0, 2;
  const R0Result r = r0(f, v);
  CHECK(r.r0 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(r.nonnegative);
  CHECK_FALSE(r.warning.empty());
}

TEST_CASE("property: R0 matches the dense eigenvalue oracle") {
  Lcg rng(199);
  for (int t = 0; t < 20; ++t) {
    const Index n = rng.uniform_int(1, 4);
    const Matrix f = rng.uniform_matrix(n, n, 0.0, 1.0);
    // V a nonsingular M-matrix so V⁻¹ ≥ 0.
    Matrix v = -rng.uniform_matrix(n, n, 0.0, 0.2);
    v.diagonal() = Vector::Constant(n, 0.3 * static_cast<double>(n) + 0.5);
    const double oracle = spectral_radius_oracle(f * v.inverse());
    CHECK(std::abs(r0(f, v).r0 - oracle) <= 1e-8 * std::max(oracle, 1.0));
  }
}

TEST_CASE("stability verdicts") {
  const StabilityReport damped = stability_verdict(models::damped_oscillator(), Vector::Zero(2));
  CHECK(damped.hurwitz);
  REQUIRE(damped.lyapunov_P.has_value());
  CHECK(is_spd(*damped.lyapunov_P));
  CHECK(damped.spectral_abscissa_bound < 0.0);
  CHECK(damped.spectral_abscissa_bound >= -0.5 - 1e-9);
  const VectorField grow = [](const Vector& x) -> Vector { return x; };
  CHECK_FALSE(stability_verdict(grow, Vector::Zero(1)).hurwitz);
  CHECK(stability_verdict(models::logistic(), Vector::Ones(1)).hurwitz);
  CHECK_FALSE(stability_verdict(models::logistic(), Vector::Zero(1)).hurwitz);
}

TEST_CASE("simulation") {
  const VectorField decay = [](const Vector& x) -> Vector { return -x; };
  const Trajectory t = simulate(decay, Vector::Ones(1), 1.0, 0.01);
  CHECK(std::abs(t.x.back()(0) - std::exp(-1.0)) <= 1e-6);
  CHECK(t.t.back() == doctest::Approx(1.0));
  const Trajectory eq = simulate(models::logistic(), Vector::Ones(1), 5.0, 0.1);
  for (const auto& x : eq.x) CHECK(x(0) == 1.0);
  CHECK_THROWS_AS(simulate(decay, Vector::Ones(1), 1.0, 0.0), InvalidArgument);
  const VectorField blow = [](const Vector& x) -> Vector { return x.array().square(); };
  CHECK_THROWS_AS(simulate(blow, Vector::Ones(1), 10.0, 0.1), NumericalError);
}

TEST_CASE("Lyapunov function decays along stable trajectories") {
  const VectorField f = models::damped_oscillator();
  const StabilityReport r = stability_verdict(f, Vector::Zero(2));
  const Matrix& p = *r.lyapunov_P;
  const Vector x0 = (Vector(2) << 1.0, -0.5).finished();
  const Trajectory t = simulate(f, x0, 20.0, 0.01);
  CHECK(t.x.back().norm() < x0.norm());
  double previous = x0.dot(p * x0);
  for (const auto& x : t.x) {
    const double v = x.dot(p * x);
    CHECK(v <= previous + 1e-8);
    previous = v;
  }
}

TEST_CASE("SEIRS demo: R0 closed form and the threshold") {
  models::Seirs s;
  CHECK(std::abs(r0(s.new_infections(), s.transitions()).r0 - s.r0_closed_form()) <=
        1e-8 * s.r0_closed_form());
  for (double beta : {0.01, 0.02, 0.3, 0.6}) {
    s.beta = beta;
    const double value = s.r0_closed_form();
    const StabilityReport rep = stability_verdict(s.field(), s.disease_free_equilibrium());
    CHECK(rep.hurwitz == (value < 1.0));
  }
}

}  // TEST_SUITE
