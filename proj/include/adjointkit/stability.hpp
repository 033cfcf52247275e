#pragma once

#include "adjointkit/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace adjointkit::stability {

using VectorField = std::function<Vector(const Vector&)>;

/// Largest system the dense Kronecker Lyapunov solver accepts.
inline constexpr Index kMaxLyapunovDim = 64;

/// Solves PA + AᵀP + Q = 0 through the n²×n² system
/// (Aᵀ⊗I + I⊗Aᵀ) vec(P) = −vec(Q), then symmetrizes P.
/// Throws NumericalError when the system is singular (A and −A share an
/// eigenvalue) and InvalidArgument for bad shapes, n > 64 or a non-SPD Q.
Matrix lyapunov_solve(const Matrix& a, const Matrix& q);

/// ‖PA + AᵀP + Q‖_F.
double lyapunov_residual(const Matrix& a, const Matrix& p, const Matrix& q);

/// Cholesky succeeds on the symmetric part and P is symmetric to 1e-10.
bool is_spd(const Matrix& p);

/// Monic characteristic polynomial det(λI − A) by Faddeev–LeVerrier:
/// returns [1, a₁, …, aₙ] for λⁿ + a₁λⁿ⁻¹ + … + aₙ.
Vector characteristic_polynomial(const Matrix& a);

struct RouthResult {
  bool hurwitz = false;
  /// A pivot vanished: some root lies on (or numerically at) the imaginary axis.
  bool boundary = false;
  /// Smallest |leading-column entry| encountered.
  double margin = 0.0;
  std::vector<double> first_column;
};

/// Routh tabulation of a polynomial given highest degree first.
RouthResult routh_hurwitz(const Vector& coefficients);

/// Routh–Hurwitz on the characteristic polynomial of A.
RouthResult hurwitz_check(const Matrix& a);

/// Central-difference Jacobian of f at x_eq. A nonpositive h selects
/// 1e-5 (1 + ‖x_eq‖). Throws InvalidArgument unless ‖f(x_eq)‖ ≤ 1e-8.
Matrix linearize(const VectorField& f, const Vector& x_eq, double h = -1.0);

struct R0Result {
  double r0 = 0.0;
  int iterations = 0;
  /// FV⁻¹ had a negative entry; the Perron assumption may not hold.
  bool nonnegative = true;
  std::string warning;
};

/// ρ(FV⁻¹) by power iteration on FV⁻¹ + I (for a nonnegative matrix the
/// shift keeps the Perron root dominant), tolerance 1e-10, at most 10⁴ steps.
/// Throws NumericalError for a singular V or no convergence.
R0Result r0(const Matrix& f, const Matrix& v);

struct StabilityReport {
  Matrix jacobian;
  bool hurwitz = false;
  double routh_margin = 0.0;
  /// Present whenever the Lyapunov system with Q = I was solvable.
  std::optional<Matrix> lyapunov_P;
  bool spd_certificate = false;
  /// Re λ ≤ −1 / (2 λ_max(P)) when certified, +∞ otherwise.
  double spectral_abscissa_bound = 0.0;
  std::optional<double> r0;
};

/// linearize → hurwitz_check → lyapunov_solve(Q = I) → SPD test.
/// Throws NumericalError if the Routh verdict and the Lyapunov certificate disagree.
StabilityReport stability_verdict(const VectorField& f, const Vector& x_eq, double h = -1.0);

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> x;
};

/// Classical RK4 with round(T/dt) equal steps; every state is returned.
/// Throws NumericalError on a non-finite state.
Trajectory simulate(const VectorField& f, const Vector& x0, double t_end, double dt);

namespace models {

/// ẋ₁ = x₂, ẋ₂ = −x₁ − x₂.
VectorField damped_oscillator();
/// ẋ = x(1 − x).
VectorField logistic();

/// SEIRS compartments (S, E, I, R) as population fractions:
///   S' = μ − βSI − μS + ωR
///   E' = βSI − (σ + μ)E
///   I' = σE − (γ + μ)I
///   R' = γI − (ω + μ)R
/// with disease-free equilibrium (1, 0, 0, 0).
struct Seirs {
  double beta = 0.3;
  double sigma = 0.2;
  double gamma = 0.1;
  double mu = 0.01;
  double omega = 0.05;

  VectorField field() const;
  Vector disease_free_equilibrium() const;
  /// Next-generation split of the (E, I) block at the DFE.
  Matrix new_infections() const;
  Matrix transitions() const;
  /// βσ / ((σ + μ)(γ + μ)).
  double r0_closed_form() const;
};

}  // namespace models

}  // namespace adjointkit::stability
