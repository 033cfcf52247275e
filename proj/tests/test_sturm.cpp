#include "adjointkit/sturm.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <numbers>

using namespace adjointkit;
using namespace adjointkit::sturm;
using testing_util::max_abs_diff;

namespace {

ModeSet modes_for(Boundary bc, Index n, Index k) {
  SLProblem p;
  p.bc = bc;
  p.n = n;
  return solve_modes(discretize(p), k);
}

// Weighted L² distance between a mode and a sampled function, up to sign.
double l2_up_to_sign(const ModeSet& m, const Vector& mode, const Vector& f) {
  return std::min(std::sqrt(weighted_inner(m, mode - f, mode - f)),
                  std::sqrt(weighted_inner(m, mode + f, mode + f)));
}

// M-orthogonal projector onto span of the columns.
Matrix projector(const Matrix& cols, double h) {
  const Matrix gram = h * cols.transpose() * cols;
  return cols * gram.inverse() * cols.transpose() * h;
}

}  // namespace

TEST_SUITE("sturm-liouville") {

TEST_CASE("textbook Dirichlet stencil") {
  SLProblem p;
  p.n = 3;
  const Discretization d = discretize(p);
  const double s = 1.0 / (d.h * d.h);
  Matrix k(3, 3);
  k << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  CHECK(max_abs_diff(d.stiffness, s * k) <= 1e-12);
}

TEST_CASE("Neumann constants and periodic row sums") {
  SLProblem p;
  p.n = 10;
  p.bc = Boundary::neumann;
  const Discretization dn = discretize(p);
  CHECK((dn.stiffness * Vector::Ones(10)).cwiseAbs().maxCoeff() <= 1e-10);
  p.bc = Boundary::periodic;
  const Discretization dp = discretize(p);
  CHECK(dp.stiffness.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(max_abs_diff(dp.stiffness, dp.stiffness.transpose()) == 0.0);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(parse_boundary("robin"), InvalidArgument);
  SLProblem p;
  p.n = 2;
  CHECK_THROWS_AS(discretize(p), InvalidArgument);
  p.n = 8;
  p.rho = [](double) { return -1.0; };
  CHECK_THROWS_AS(discretize(p), InvalidArgument);
  SLProblem ok;
  ok.n = 8;
  CHECK_THROWS_AS(solve_modes(discretize(ok), 9), InvalidArgument);
}

TEST_CASE("Dirichlet eigenvalues match the discrete formula; modes match sine samples") {
  const ModeSet m = modes_for(Boundary::dirichlet, 63, 63);
  for (Index j = 0; j < 63; ++j) {
    const double exact = dirichlet_discrete_eigenvalue(j + 1, m.h);
    CHECK(std::abs(m.eigenvalues(j) - exact) <= 1e-9 * exact);
  }
  for (Index j = 1; j <= 5; ++j) {
    const Vector s = std::sqrt(2.0) * (double(j) * std::numbers::pi * m.x.array()).sin().matrix();
    CHECK(l2_up_to_sign(m, m.modes.col(j - 1), s) <= 1e-3);
  }
}

TEST_CASE("Neumann first mode is constant; cell-centred eigenvalues") {
  const ModeSet m = modes_for(Boundary::neumann, 32, 6);
  CHECK(std::abs(m.eigenvalues(0)) <= 1e-9);
  CHECK(l2_up_to_sign(m, m.modes.col(0), Vector::Ones(32)) <= 1e-10);
  for (Index k = 1; k < 6; ++k) {
    const double s = std::sin(double(k) * std::numbers::pi * m.h / 2.0);
    CHECK(m.eigenvalues(k) == doctest::Approx(4.0 / (m.h * m.h) * s * s).epsilon(1e-10));
    const Vector c = std::sqrt(2.0) * (double(k) * std::numbers::pi * m.x.array()).cos().matrix();
    CHECK(l2_up_to_sign(m, m.modes.col(k), c) <= 1e-10);
  }
}

TEST_CASE("property: rho-orthonormality and eigen residuals with variable coefficients") {
  SLProblem p;
  p.n = 40;
  p.p = [](double x) { return 1.0 + x * x; };
  p.q = [](double x) { return 2.0 * x; };
  p.rho = [](double x) { return 1.0 + 0.5 * std::sin(3.0 * x); };
  for (Boundary bc : {Boundary::dirichlet, Boundary::neumann, Boundary::periodic}) {
    p.bc = bc;
    const Discretization d = discretize(p);
    CHECK(max_abs_diff(d.stiffness, d.stiffness.transpose()) == 0.0);
    const ModeSet m = solve_modes(d, 40);
    const Matrix gram = m.h * m.modes.transpose() * m.rho.asDiagonal() * m.modes;
    CHECK(max_abs_diff(gram, Matrix::Identity(40, 40)) <= 1e-10);
    const double kn = d.stiffness.norm();
    for (Index j = 0; j < 40; ++j) {
      CHECK((d.stiffness * m.modes.col(j) -
             m.eigenvalues(j) * m.rho.cwiseProduct(m.modes.col(j))).norm() <= 1e-9 * kn);
      if (j > 0) CHECK(m.eigenvalues(j) >= m.eigenvalues(j - 1));
    }
  }
}

TEST_CASE("Fourier coefficients") {
  const ModeSet m = modes_for(Boundary::dirichlet, 63, 63);
  const Vector c3 = fourier_coefficients(m.modes.col(2), m);
  CHECK(max_abs_diff(c3, Vector::Unit(63, 2)) <= 1e-12);
  CHECK(fourier_coefficients(Vector::Zero(63), m).cwiseAbs().maxCoeff() == 0.0);
  const Vector f = (m.x.array() * (1.0 - m.x.array())).matrix();
  const Vector c = fourier_coefficients(f, m);
  CHECK(max_abs_diff(reconstruct(c, m, 63), f) <= 1e-9);
  for (Index j = 1; j <= 9; j += 2) {
    // Modes are normalized to √2 sin(jπx); the sine-series coefficient is b_j = √2 c_j.
    const double bj = std::sqrt(2.0) * std::abs(c(j - 1));
    const double exact = 8.0 / std::pow(double(j) * std::numbers::pi, 3);
    CHECK(std::abs(bj - exact) <= 1e-3);
  }
  for (Index j = 2; j <= 10; j += 2) CHECK(std::abs(c(j - 1)) <= 1e-12);
}

TEST_CASE("truncation errors") {
  const ModeSet m = modes_for(Boundary::dirichlet, 63, 63);
  const std::vector<double> single = truncation_error(m.modes.col(4), m, {0, 3, 5, 6, 63});
  CHECK(single[0] == doctest::Approx(1.0));
  CHECK(single[2] <= 1e-12);
  CHECK(single[3] <= 1e-12);
  const Vector f = (m.x.array() * (1.0 - m.x.array())).matrix();
  const std::vector<double> e = truncation_error(f, m, {4, 16});
  CHECK(e[1] * 10.0 <= e[0]);
  Lcg rng(211);
  const Vector r = rng.uniform_vector(63);
  std::vector<Index> all;
  for (Index k = 0; k <= 63; ++k) all.push_back(k);
  const std::vector<double> er = truncation_error(r, m, all);
  for (std::size_t k = 1; k < er.size(); ++k) CHECK(er[k] <= er[k - 1]);
  CHECK(er.back() <= 1e-10);
}

TEST_CASE("property: Pythagoras for partial sums") {
  const ModeSet m = modes_for(Boundary::dirichlet, 31, 31);
  Lcg rng(223);
  const Vector f = rng.uniform_vector(31);
  const Vector c = fourier_coefficients(f, m);
  const double total = weighted_inner(m, f, f);
  for (Index n_terms : {0, 5, 17, 31}) {
    const Vector rest = f - reconstruct(c, m, n_terms);
    const double split = c.head(n_terms).squaredNorm() + weighted_inner(m, rest, rest);
    CHECK(std::abs(split - total) <= 1e-9 * total);
  }
}

TEST_CASE("second-order convergence of the continuum eigenvalues") {
  std::vector<ModeSet> runs;
  for (Index n : {15, 31, 63}) runs.push_back(modes_for(Boundary::dirichlet, n, 3));
  for (Index j = 0; j < 3; ++j) {
    const double exact = std::pow(double(j + 1) * std::numbers::pi, 2);
    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
      const double ratio = std::abs(runs[r].eigenvalues(j) - exact) /
                           std::abs(runs[r + 1].eigenvalues(j) - exact);
      CHECK(ratio >= 3.2);
      CHECK(ratio <= 4.8);
    }
  }
}

TEST_CASE("periodic eigenvalue pairs span the Fourier modes") {
  const Index n = 64;
  const ModeSet m = modes_for(Boundary::periodic, n, 7);
  CHECK(std::abs(m.eigenvalues(0)) <= 1e-9);
  for (Index k = 1; k <= 3; ++k) {
    const Index i = 2 * k - 1;
    CHECK(m.eigenvalues(i) == doctest::Approx(m.eigenvalues(i + 1)).epsilon(1e-10));
    Matrix fourier(n, 2);
    fourier.col(0) = (2.0 * double(k) * std::numbers::pi * m.x.array()).sin().matrix();
    fourier.col(1) = (2.0 * double(k) * std::numbers::pi * m.x.array()).cos().matrix();
    const Matrix pair = m.modes.middleCols(i, 2);
    CHECK(max_abs_diff(projector(pair, m.h), projector(fourier, m.h)) <= 1e-3);
  }
}

}  // TEST_SUITE
