#pragma once

#include "adjointkit/adjoint_optim.hpp"
#include "adjointkit/operator_core.hpp"

#include <memory>

namespace adjointkit::pde {

/// Thomas algorithm for a tridiagonal system. `lower` and `upper` hold the
/// n−1 off-diagonals. Throws NumericalError on a zero pivot.
Vector tridiagonal_solve(const Vector& lower, const Vector& diag, const Vector& upper,
                         const Vector& rhs);

/// Boundary control of steady transport β u′ = 0 on (0,1) with inflow
/// condition −β u(0) = z, objective f = ½∫u².
///
/// State: nodal values u₀..uₙ on xᵢ = i/n. Constraint rows
///   c₀ = −β u₀ − z,   cᵢ = β (uᵢ − uᵢ₋₁),  i = 1..n  (first-order upwind)
/// and f = ½ h Σ_{i≥1} uᵢ². The adjoint sweep runs downwind from v(1) = 0.
/// Its first component is the inflow multiplier w = −v(0), so the reduced
/// gradient is v(0).
class AdvectionProblem : public ConstrainedProblem {
 public:
  AdvectionProblem(Index n, double beta);

  Index state_dim() const override { return n_ + 1; }
  Index control_dim() const override { return 1; }
  Vector residual(const Vector& u, const Vector& z) const override;
  Vector solve_forward(const Vector& z) const override;
  Vector apply_DuC(const Vector& u, const Vector& z, const Vector& du) const override;
  Vector apply_DzC(const Vector& u, const Vector& z, const Vector& dz) const override;
  Vector solve_DuC_adjoint(const Vector& u, const Vector& z, const Vector& rhs) const override;
  Vector apply_DzC_adjoint(const Vector& u, const Vector& z, const Vector& y) const override;
  double objective(const Vector& u, const Vector& z) const override;
  Vector grad_u_f(const Vector& u, const Vector& z) const override;
  Vector grad_z_f(const Vector& u, const Vector& z) const override;

  Index cells() const { return n_; }
  double beta() const { return beta_; }
  double h() const { return 1.0 / static_cast<double>(n_); }
  /// Nodes x₀..xₙ.
  Vector grid() const;
  /// Continuous adjoint v at the nodes, recovered from the multiplier vector
  /// (vⱼ = yⱼ₊₁, vₙ = 0).
  Vector adjoint_field(const Vector& y) const;

 private:
  Index n_;
  double beta_;
};

/// Coefficient inversion for −(e^z u′)′ = 0 on (0,1), u(0) = g0, u(1) = g1,
/// objective f = ½ h Σ (uᵢ − u_obsᵢ)² (+ κ/2 h ‖z‖² when κ > 0).
///
/// State: interior nodes u₁..uₙ (h = 1/(n+1)). Control: log-diffusivity on
/// the n+1 cell midpoints. The constraint is the conservative stencil
///   cᵢ = [kᵢ(uᵢ − uᵢ₊₁) + kᵢ₋₁(uᵢ − uᵢ₋₁)]/h,  kⱼ = e^{zⱼ},
/// which is symmetric, so the adjoint reuses the forward operator with
/// forcing −h(u − u_obs) and zero boundary data. The gradient per cell is
/// kⱼ (Δu/h)(Δv/h) h.
class EllipticProblem : public ConstrainedProblem {
 public:
  EllipticProblem(Index n, double g0, double g1, Vector u_obs, double kappa = 0.0);

  Index state_dim() const override { return n_; }
  Index control_dim() const override { return n_ + 1; }
  Vector residual(const Vector& u, const Vector& z) const override;
  Vector solve_forward(const Vector& z) const override;
  Vector apply_DuC(const Vector& u, const Vector& z, const Vector& du) const override;
  Vector apply_DzC(const Vector& u, const Vector& z, const Vector& dz) const override;
  Vector solve_DuC_adjoint(const Vector& u, const Vector& z, const Vector& rhs) const override;
  Vector apply_DzC_adjoint(const Vector& u, const Vector& z, const Vector& y) const override;
  double objective(const Vector& u, const Vector& z) const override;
  Vector grad_u_f(const Vector& u, const Vector& z) const override;
  Vector grad_z_f(const Vector& u, const Vector& z) const override;

  double h() const { return 1.0 / static_cast<double>(n_ + 1); }
  double g0() const { return g0_; }
  double g1() const { return g1_; }
  double kappa() const { return kappa_; }
  const Vector& observations() const { return u_obs_; }
  /// Interior nodes x₁..xₙ.
  Vector grid() const;
  /// Cell midpoints, where the control lives.
  Vector midpoints() const;

  /// D_u c as a dense matrix (the forward operator).
  Matrix forward_operator(const Vector& z) const;
  /// The matrix the adjoint solve inverts, [D_u c]ᵀ, assembled from the
  /// swapped off-diagonals. Equal to forward_operator(z) since the stencil is
  /// symmetric.
  Matrix adjoint_operator(const Vector& z) const;

 private:
  struct Tridiagonal {
    Vector lower, diag, upper;
  };
  Tridiagonal stencil(const Vector& z) const;
  Tridiagonal adjoint_stencil(const Vector& z) const;
  /// u with the boundary values attached: [g0, u₁..uₙ, g1].
  Vector with_boundary(const Vector& u) const;

  Index n_;
  double g0_;
  double g1_;
  Vector u_obs_;
  double kappa_;
};

std::unique_ptr<AdvectionProblem> build_advection_problem(Index n, double beta);
std::unique_ptr<EllipticProblem> build_elliptic_problem(Index n, double g0, double g1,
                                                        const Vector& u_obs, double kappa = 0.0);

/// Initial Armijo trial step for elliptic descent; the gradient carries the
/// quadrature weight h, so unit steps barely move the control.
inline constexpr double kEllipticDescentStep = 100.0;

/// Smooth reference log-diffusivity used to synthesize elliptic data:
/// z*(x) = 0.5 sin(2πx) + 0.3 x, sampled at the cell midpoints.
Vector elliptic_reference_control(Index n);
/// u_obs = forward(z*) for the reference control.
Vector elliptic_reference_data(Index n, double g0, double g1);

/// Registry with "advection", "elliptic" (reference data) and "lq-toy".
ProblemRegistry builtin_problems();

/// Smallest singular value of the operator (the discrete inf-sup constant).
double discrete_infsup(const DenseOperator& op);

}  // namespace adjointkit::pde
