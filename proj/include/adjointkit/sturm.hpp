#pragma once

#include "adjointkit/types.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace adjointkit::sturm {

enum class Boundary { dirichlet, neumann, periodic };

Boundary parse_boundary(std::string_view name);
std::string to_string(Boundary bc);

using Coefficient = std::function<double(double)>;

/// −(p v′)′ + q v = λ ρ v on (0, 1) with p > 0, q ≥ 0, ρ > 0.
///
/// This is the positive form of (1/ρ)[(p̃ v′)′ + q̃ v] = κ v with p̃ = −p,
/// q̃ = −q and κ = −λ, so the stiffness matrix is symmetric positive
/// semidefinite.
struct SLProblem {
  Coefficient p = [](double) { return 1.0; };
  Coefficient q = [](double) { return 0.0; };
  Coefficient rho = [](double) { return 1.0; };
  Boundary bc = Boundary::dirichlet;
  Index n = 63;
};

/// Grid layout per boundary condition:
///  - dirichlet: interior nodes xᵢ = (i+1)h, h = 1/(n+1)
///  - neumann:   cell centres xᵢ = (i+½)h, h = 1/n, ghost values reflected
///  - periodic:  xᵢ = ih, h = 1/n, indices wrap around
struct Discretization {
  Matrix stiffness;  // K, symmetric
  Vector rho;        // diagonal of Mρ
  Vector x;
  double h = 0.0;
  Boundary bc = Boundary::dirichlet;
};

/// Conservative second-order stencil
///   (Kv)ᵢ = [p_{i+½}(vᵢ − vᵢ₊₁) + p_{i−½}(vᵢ − vᵢ₋₁)]/h² + qᵢvᵢ.
/// Throws InvalidArgument for n < 3 or nonpositive p or ρ on the grid.
Discretization discretize(const SLProblem& problem);

/// Leading eigenpairs, λ ascending; modes orthonormal in ⟨f, g⟩ = h Σ ρᵢ fᵢ gᵢ.
struct ModeSet {
  Vector eigenvalues;
  Matrix modes;
  Vector rho;
  Vector x;
  double h = 0.0;
};

/// Reduces K v = λ Mρ v to Mρ^{-1/2} K Mρ^{-1/2} w = λ w, diagonalizes with
/// Jacobi and maps back. Requires 1 ≤ k ≤ n; throws for nonpositive ρ.
ModeSet solve_modes(const Discretization& disc, Index k);

/// h Σ ρᵢ fᵢ gᵢ.
double weighted_inner(const ModeSet& modes, const Vector& f, const Vector& g);

/// cⱼ = ⟨f, vⱼ⟩ for every mode in the set.
Vector fourier_coefficients(const Vector& f, const ModeSet& modes);

/// Σ_{j<N} cⱼ vⱼ.
Vector reconstruct(const Vector& coefficients, const ModeSet& modes, Index n_terms);

/// ρ-weighted L² error of the N-term expansion for each N in the list.
/// Computed as sqrt(‖f − P_k f‖² + Σ_{N≤j<k} cⱼ²), which is the direct
/// error by orthonormality and is exactly nonincreasing in N.
std::vector<double> truncation_error(const Vector& f, const ModeSet& modes,
                                     const std::vector<Index>& n_list);

/// (4/h²) sin²(jπh/2): the exact eigenvalues of the constant-coefficient
/// dirichlet stencil, j = 1..n.
double dirichlet_discrete_eigenvalue(Index j, double h);

}  // namespace adjointkit::sturm
