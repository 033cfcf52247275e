#pragma once

#include "adjointkit/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace adjointkit {

/// Equality-constrained problem  min f(u, z)  subject to  c(u, z) = 0, with
/// state u ∈ ℝⁿ and control z ∈ ℝᵖ, where D_u c is invertible so the state
/// can be eliminated. All inner products are Euclidean; quadrature weights
/// belong inside f and c.
///
/// Implementations must be safe for concurrent read-only evaluation.
class ConstrainedProblem {
 public:
  virtual ~ConstrainedProblem() = default;

  virtual Index state_dim() const = 0;
  virtual Index control_dim() const = 0;

  virtual Vector residual(const Vector& u, const Vector& z) const = 0;
  /// u with residual(u, z) = 0. Throws NumericalError on failure.
  virtual Vector solve_forward(const Vector& z) const = 0;

  virtual Vector apply_DuC(const Vector& u, const Vector& z, const Vector& du) const = 0;
  virtual Vector apply_DzC(const Vector& u, const Vector& z, const Vector& dz) const = 0;
  /// Solves [D_u c]ᵀ y = rhs. The default assembles D_u c column by column and
  /// uses a dense LU; problems override it to exploit structure.
  virtual Vector solve_DuC_adjoint(const Vector& u, const Vector& z, const Vector& rhs) const;
  virtual Vector apply_DzC_adjoint(const Vector& u, const Vector& z, const Vector& y) const = 0;

  virtual double objective(const Vector& u, const Vector& z) const = 0;
  virtual Vector grad_u_f(const Vector& u, const Vector& z) const = 0;
  virtual Vector grad_z_f(const Vector& u, const Vector& z) const = 0;
};

/// Dense D_u c and D_z c, assembled from the directional derivatives.
Matrix assemble_DuC(const ConstrainedProblem& problem, const Vector& u, const Vector& z);
Matrix assemble_DzC(const ConstrainedProblem& problem, const Vector& u, const Vector& z);
/// The dense fallback behind ConstrainedProblem::solve_DuC_adjoint.
Vector dense_adjoint_solve(const ConstrainedProblem& problem, const Vector& u, const Vector& z,
                           const Vector& rhs);

struct ReducedGradientReport {
  double f_value = 0.0;
  Vector gradient;
  Vector state;
  Vector adjoint;
  double forward_residual_norm = 0.0;
  /// ‖[D_u c]ᵀ y + ∇_u f‖.
  double adjoint_residual_norm = 0.0;
};

/// Forward solve, adjoint solve [D_u c]ᵀ y = −∇_u f, then
/// ∇f = ∇_z f + [D_z c]ᵀ y.
ReducedGradientReport reduced_gradient(const ConstrainedProblem& problem, const Vector& z);

/// f(solve_forward(z), z).
double reduced_objective(const ConstrainedProblem& problem, const Vector& z);

struct FdCheckResult {
  std::vector<double> steps;
  /// ‖g_fd − g‖_∞ / max(‖g‖_∞, 1e-12) per step.
  std::vector<double> rel_errors;
};

/// Central differences of the reduced objective along every control
/// direction, compared against reduced_gradient. Probes run concurrently.
FdCheckResult fd_gradient_check(const ConstrainedProblem& problem, const Vector& z,
                                const std::vector<double>& steps);

struct DescentStep {
  int k = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  /// Accepted step length (0 on the terminating row).
  double step = 0.0;
};

struct DescentResult {
  Vector z;
  std::vector<DescentStep> log;
  bool converged = false;
  /// Backtracking exhausted without an Armijo decrease.
  bool stalled = false;
};

struct DescentOptions {
  double step = 1.0;
  int iters = 100;
  double tol = 1e-8;
  double armijo_c1 = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
};

struct Evaluation {
  double f = 0.0;
  Vector gradient;
};

/// Gradient descent with Armijo backtracking: every iteration starts at
/// options.step and halves until f(z − s g) ≤ f(z) − c₁ s ‖g‖².
DescentResult armijo_descent(const std::function<double(const Vector&)>& objective,
                             const std::function<Evaluation(const Vector&)>& evaluate,
                             Vector z0, const DescentOptions& options);

/// armijo_descent on the reduced objective with adjoint gradients.
/// Forward-solve failures are rethrown as NumericalError naming the iterate.
DescentResult gradient_descent(const ConstrainedProblem& problem, const Vector& z0, double step,
                               int iters, double tol);

struct KktResiduals {
  double forward = 0.0;
  double adjoint = 0.0;
  double control = 0.0;
};

/// ‖c(u,z)‖, ‖∇_u f + [D_u c]ᵀ y‖, ‖∇_z f + [D_z c]ᵀ y‖.
/// [D_u c]ᵀ y is formed from apply_DuC on canonical directions.
KktResiduals kkt_residuals(const ConstrainedProblem& problem, const Vector& u, const Vector& y,
                           const Vector& z);

/// max over random pairs of |⟨D_u c du, y⟩ − ⟨du, r⟩| / (‖du‖‖r‖), where
/// y = solve_DuC_adjoint(r). Zero when the adjoint solve is consistent.
double adjoint_solve_defect(const ConstrainedProblem& problem, const Vector& u, const Vector& z,
                            int trials, std::uint64_t seed);

/// max relative gap between apply_DuC and central differences of the residual
/// in u along random directions.
double linearization_defect(const ConstrainedProblem& problem, const Vector& u, const Vector& z,
                            double h, int trials, std::uint64_t seed);

/// Linear-quadratic toy: c(u, z) = u − Bz, f = ½‖u‖² + ½ control_cost ‖z‖².
/// With state_cost = false the ½‖u‖² term is dropped, so f does not depend on u.
/// Reduced gradient: BᵀBz + control_cost·z.
class LinearQuadraticProblem : public ConstrainedProblem {
 public:
  explicit LinearQuadraticProblem(Matrix b, double control_cost = 0.0, bool state_cost = true);

  Index state_dim() const override { return b_.rows(); }
  Index control_dim() const override { return b_.cols(); }
  Vector residual(const Vector& u, const Vector& z) const override;
  Vector solve_forward(const Vector& z) const override;
  Vector apply_DuC(const Vector& u, const Vector& z, const Vector& du) const override;
  Vector apply_DzC(const Vector& u, const Vector& z, const Vector& dz) const override;
  Vector apply_DzC_adjoint(const Vector& u, const Vector& z, const Vector& y) const override;
  double objective(const Vector& u, const Vector& z) const override;
  Vector grad_u_f(const Vector& u, const Vector& z) const override;
  Vector grad_z_f(const Vector& u, const Vector& z) const override;

 private:
  Matrix b_;
  double control_cost_;
  bool state_cost_;
};

/// Options shared by the named problem builders.
struct ProblemOptions {
  Index n = 32;
  double beta = 1.0;
  double g0 = 0.0;
  double g1 = 1.0;
  double kappa = 0.0;
  std::uint64_t seed = kDefaultSeed;
};

/// Name → builder map used by the `pdeopt` command.
class ProblemRegistry {
 public:
  using Builder = std::function<std::unique_ptr<ConstrainedProblem>(const ProblemOptions&)>;

  void add(const std::string& name, Builder builder);
  bool contains(const std::string& name) const;
  /// Throws InvalidArgument for unknown names.
  std::unique_ptr<ConstrainedProblem> create(const std::string& name,
                                             const ProblemOptions& options) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Builder> builders_;
};

}  // namespace adjointkit
