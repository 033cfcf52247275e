#include "adjointkit/generators.hpp"
#include "adjointkit/kernels.hpp"
#include "test_helpers.hpp"

#include <atomic>

using namespace adjointkit;

TEST_SUITE("kernels") {

TEST_CASE("Kronecker sum: serial reference equals the Eigen product and the OpenMP variant") {
  Lcg rng(251);
  for (Index n : {1, 3, 8, 20}) {
    const Matrix a = rng.uniform_matrix(n, n);
    const Matrix id = Matrix::Identity(n, n);
    Matrix expected(n * n, n * n);
    // Aᵀ⊗I + I⊗Aᵀ with (X⊗Y)(i*n+k, j*n+l) = X(i,j) Y(k,l)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k)
          for (Index l = 0; l < n; ++l)
            expected(i * n + k, j * n + l) = a(j, i) * id(k, l) + id(i, j) * a(l, k);
    const Matrix s = kernels::serial::kron_sum_transpose(a);
    CHECK((s - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK((kernels::omp::kron_sum_transpose(a) - s).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("adjoint defects: serial and OpenMP agree bitwise") {
  Lcg rng(257);
  const Matrix a = rng.uniform_matrix(7, 5);
  const Matrix md = gen::spd_matrix(rng, 5);
  const Matrix mc = gen::spd_matrix(rng, 7);
  const Matrix a_star = md.llt().solve(a.transpose() * mc);
  const Matrix u = rng.uniform_matrix(5, 64);
  const Matrix v = rng.uniform_matrix(7, 64);
  const Vector s = kernels::serial::adjoint_defects(a, a_star, md, mc, u, v);
  const Vector o = kernels::omp::adjoint_defects(a, a_star, md, mc, u, v);
  CHECK(s.size() == 64);
  CHECK((s - o).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.maxCoeff() <= 1e-12);
}

TEST_CASE("central gradient: serial and OpenMP agree bitwise") {
  Lcg rng(263);
  const Vector c = rng.uniform_vector(40);
  const auto f = [&c](const Vector& z) { return (z.array().sin() * c.array()).sum(); };
  const Vector z = rng.uniform_vector(40);
  const Vector s = kernels::serial::central_gradient(f, z, 1e-5);
  const Vector o = kernels::omp::central_gradient(f, z, 1e-5);
  CHECK((s - o).cwiseAbs().maxCoeff() == 0.0);
  const Vector exact = (z.array().cos() * c.array()).matrix();
  CHECK((s - exact).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("for_each_index visits every index once and rethrows failures") {
  std::vector<std::atomic<int>> hits(100);
  kernels::omp::for_each_index(100, [&](Index i) { hits[static_cast<std::size_t>(i)]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(kernels::omp::for_each_index(10,
                                               [](Index i) {
                                                 if (i == 7) throw NumericalError("boom");
                                               }),
                  NumericalError);
  CHECK(kernels::max_threads() >= 1);
}

}  // TEST_SUITE
