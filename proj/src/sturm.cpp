#include "adjointkit/sturm.hpp"

#include "adjointkit/operator_core.hpp"
#include "adjointkit/spectral.hpp"

#include <cmath>
#include <numbers>

namespace adjointkit::sturm {

Boundary parse_boundary(std::string_view name) {
  if (name == "dirichlet") return Boundary::dirichlet;
  if (name == "neumann") return Boundary::neumann;
  if (name == "periodic") return Boundary::periodic;
  throw InvalidArgument("invalid boundary condition '" + std::string(name) +
                        "' (expected dirichlet, neumann or periodic)");
}

std::string to_string(Boundary bc) {
  switch (bc) {
    case Boundary::dirichlet:
      return "dirichlet";
    case Boundary::neumann:
      return "neumann";
    case Boundary::periodic:
      return "periodic";
  }
  return "unknown";
}

Discretization discretize(const SLProblem& problem) {
  const Index n = problem.n;
  if (n < 3) throw InvalidArgument("discretize: need n >= 3");
  Discretization d;
  d.bc = problem.bc;
  d.x.resize(n);
  switch (problem.bc) {
    case Boundary::dirichlet:
      d.h = 1.0 / static_cast<double>(n + 1);
      for (Index i = 0; i < n; ++i) d.x(i) = static_cast<double>(i + 1) * d.h;
      break;
    case Boundary::neumann:
      d.h = 1.0 / static_cast<double>(n);
      for (Index i = 0; i < n; ++i) d.x(i) = (static_cast<double>(i) + 0.5) * d.h;
      break;
    case Boundary::periodic:
      d.h = 1.0 / static_cast<double>(n);
      for (Index i = 0; i < n; ++i) d.x(i) = static_cast<double>(i) * d.h;
      break;
    default:
      throw InvalidArgument("discretize: invalid boundary flag");
  }

  const double h = d.h;
  const double inv_h2 = 1.0 / (h * h);
  d.stiffness = Matrix::Zero(n, n);
  d.rho.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double xi = d.x(i);
    d.rho(i) = problem.rho(xi);
    const double q = problem.q(xi);
    if (!(d.rho(i) > 0.0)) throw InvalidArgument("discretize: rho must be positive on the grid");
    d.stiffness(i, i) += q;

    // Face to the right of node i couples i and i+1.
    const double p_right = problem.p(xi + 0.5 * h);
    if (!(p_right > 0.0)) throw InvalidArgument("discretize: p must be positive on the grid");
    Index right = i + 1;
    bool coupled = true;
    if (right == n) {
      switch (problem.bc) {
        case Boundary::dirichlet:
          // Boundary value is zero: the face still contributes to the diagonal.
          d.stiffness(i, i) += p_right * inv_h2;
          coupled = false;
          break;
        case Boundary::neumann:
          coupled = false;  // reflected ghost: zero flux through the face
          break;
        case Boundary::periodic:
          right = 0;
          break;
      }
    }
    if (coupled) {
      d.stiffness(i, i) += p_right * inv_h2;
      d.stiffness(right, right) += p_right * inv_h2;
      d.stiffness(i, right) -= p_right * inv_h2;
      d.stiffness(right, i) -= p_right * inv_h2;
    }
  }
  // Left boundary face for dirichlet.
  if (problem.bc == Boundary::dirichlet) {
    const double p_left = problem.p(d.x(0) - 0.5 * h);
    if (!(p_left > 0.0)) throw InvalidArgument("discretize: p must be positive on the grid");
    d.stiffness(0, 0) += p_left * inv_h2;
  }
  return d;
}

ModeSet solve_modes(const Discretization& disc, Index k) {
  const Index n = disc.stiffness.rows();
  if (k < 1 || k > n) throw InvalidArgument("solve_modes: need 1 <= k <= n");
  if (!(disc.rho.array() > 0.0).all()) throw InvalidArgument("solve_modes: rho must be positive");
  const Vector inv_sqrt_rho = disc.rho.cwiseSqrt().cwiseInverse();
  Matrix s = inv_sqrt_rho.asDiagonal() * disc.stiffness * inv_sqrt_rho.asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();
  const EigResult eig = jacobi_eigen_symmetric(s);

  ModeSet out;
  out.rho = disc.rho;
  out.x = disc.x;
  out.h = disc.h;
  out.eigenvalues.resize(k);
  out.modes.resize(n, k);
  const double scale = 1.0 / std::sqrt(disc.h);
  for (Index j = 0; j < k; ++j) {
    const Index src = n - 1 - j;  // Jacobi returns descending order
    out.eigenvalues(j) = eig.eigenvalues(src);
    out.modes.col(j) = scale * inv_sqrt_rho.cwiseProduct(eig.eigenvectors.col(src));
    normalize_sign(out.modes.col(j));
  }
  return out;
}

double weighted_inner(const ModeSet& modes, const Vector& f, const Vector& g) {
  if (f.size() != modes.rho.size() || g.size() != modes.rho.size())
    throw InvalidArgument("weighted_inner: vectors must be sampled on the grid");
  return modes.h * f.cwiseProduct(modes.rho).dot(g);
}

Vector fourier_coefficients(const Vector& f, const ModeSet& modes) {
  if (f.size() != modes.modes.rows())
    throw InvalidArgument("fourier_coefficients: f must be sampled on the grid");
  return modes.h * (modes.modes.transpose() * f.cwiseProduct(modes.rho));
}

Vector reconstruct(const Vector& coefficients, const ModeSet& modes, Index n_terms) {
  if (n_terms < 0 || n_terms > modes.modes.cols() || n_terms > coefficients.size())
    throw InvalidArgument("reconstruct: term count out of range");
  return modes.modes.leftCols(n_terms) * coefficients.head(n_terms);
}

std::vector<double> truncation_error(const Vector& f, const ModeSet& modes,
                                     const std::vector<Index>& n_list) {
  const Vector c = fourier_coefficients(f, modes);
  const Index k = c.size();
  const Vector outside = f - reconstruct(c, modes, k);
  const double outside2 = weighted_inner(modes, outside, outside);

  // tail(N) = Σ_{N≤j<k} cⱼ², accumulated from the end.
  std::vector<double> tail(static_cast<std::size_t>(k) + 1, 0.0);
  for (Index j = k; j-- > 0;)
    tail[static_cast<std::size_t>(j)] = tail[static_cast<std::size_t>(j) + 1] + c(j) * c(j);

  std::vector<double> out;
  for (Index n_terms : n_list) {
    if (n_terms < 0 || n_terms > k)
      throw InvalidArgument("truncation_error: N must lie in [0, number of modes]");
    out.push_back(std::sqrt(outside2 + tail[static_cast<std::size_t>(n_terms)]));
  }
  return out;
}

double dirichlet_discrete_eigenvalue(Index j, double h) {
  const double s = std::sin(static_cast<double>(j) * std::numbers::pi * h / 2.0);
  return 4.0 / (h * h) * s * s;
}

}  // namespace adjointkit::sturm
