#include "adjointkit/adjoint_optim.hpp"

#include "adjointkit/kernels.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

namespace adjointkit {

Vector ConstrainedProblem::solve_DuC_adjoint(const Vector& u, const Vector& z,
                                             const Vector& rhs) const {
  return dense_adjoint_solve(*this, u, z, rhs);
}

Matrix assemble_DuC(const ConstrainedProblem& problem, const Vector& u, const Vector& z) {
  const Index n = problem.state_dim();
  Matrix j(problem.residual(u, z).size(), n);
  for (Index k = 0; k < n; ++k) j.col(k) = problem.apply_DuC(u, z, Vector::Unit(n, k));
  return j;
}

Matrix assemble_DzC(const ConstrainedProblem& problem, const Vector& u, const Vector& z) {
  const Index p = problem.control_dim();
  Matrix j(problem.residual(u, z).size(), p);
  for (Index k = 0; k < p; ++k) j.col(k) = problem.apply_DzC(u, z, Vector::Unit(p, k));
  return j;
}

Vector dense_adjoint_solve(const ConstrainedProblem& problem, const Vector& u, const Vector& z,
                           const Vector& rhs) {
  const Matrix j = assemble_DuC(problem, u, z);
  if (j.rows() != j.cols()) throw InvalidArgument("dense_adjoint_solve: D_u c is not square");
  Eigen::FullPivLU<Matrix> lu(j.transpose());
  if (!lu.isInvertible()) throw NumericalError("dense_adjoint_solve: D_u c is singular");
  return lu.solve(rhs);
}

ReducedGradientReport reduced_gradient(const ConstrainedProblem& problem, const Vector& z) {
  if (z.size() != problem.control_dim())
    throw InvalidArgument("reduced_gradient: control has the wrong length");
  ReducedGradientReport report;
  report.state = problem.solve_forward(z);
  const Vector& u = report.state;
  report.forward_residual_norm = problem.residual(u, z).norm();

  const Vector gu = problem.grad_u_f(u, z);
  report.adjoint = problem.solve_DuC_adjoint(u, z, -gu);
  report.gradient = problem.grad_z_f(u, z) + problem.apply_DzC_adjoint(u, z, report.adjoint);
  report.f_value = problem.objective(u, z);

  // [D_u c]ᵀ y + ∇_u f, checked through ⟨D_u c eₖ, y⟩ = ([D_u c]ᵀ y)ₖ.
  Vector adjoint_residual(u.size());
  for (Index k = 0; k < u.size(); ++k)
    adjoint_residual(k) =
        problem.apply_DuC(u, z, Vector::Unit(u.size(), k)).dot(report.adjoint) + gu(k);
  report.adjoint_residual_norm = adjoint_residual.norm();
  return report;
}

double reduced_objective(const ConstrainedProblem& problem, const Vector& z) {
  return problem.objective(problem.solve_forward(z), z);
}

FdCheckResult fd_gradient_check(const ConstrainedProblem& problem, const Vector& z,
                                const std::vector<double>& steps) {
  const Vector g = reduced_gradient(problem, z).gradient;
  const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-12);
  auto f = [&problem](const Vector& zz) { return reduced_objective(problem, zz); };
  FdCheckResult out;
  for (double h : steps) {
    if (!(h > 0.0)) throw InvalidArgument("fd_gradient_check: steps must be positive");
    const Vector fd = kernels::central_gradient(f, z, h);
    out.steps.push_back(h);
    out.rel_errors.push_back((fd - g).cwiseAbs().maxCoeff() / scale);
  }
  return out;
}

DescentResult armijo_descent(const std::function<double(const Vector&)>& objective,
                             const std::function<Evaluation(const Vector&)>& evaluate,
                             Vector z0, const DescentOptions& options) {
  if (!(options.step > 0.0)) throw InvalidArgument("gradient_descent: step must be positive");
  DescentResult result;
  result.z = std::move(z0);
  Evaluation current = evaluate(result.z);
  for (int k = 0;; ++k) {
    const double gnorm = current.gradient.norm();
    if (gnorm <= options.tol) {
      result.converged = true;
      result.log.push_back({k, current.f, gnorm, 0.0});
      break;
    }
    if (k >= options.iters) {
      result.log.push_back({k, current.f, gnorm, 0.0});
      break;
    }
    const double g2 = gnorm * gnorm;
    double step = options.step;
    bool accepted = false;
    Vector trial;
    for (int b = 0; b <= options.max_backtracks; ++b) {
      trial = result.z - step * current.gradient;
      const double f_trial = objective(trial);
      if (std::isfinite(f_trial) && f_trial <= current.f - options.armijo_c1 * step * g2 &&
          f_trial < current.f) {
        accepted = true;
        break;
      }
      step *= options.shrink;
    }
    if (!accepted) {
      result.stalled = true;
      result.log.push_back({k, current.f, gnorm, 0.0});
      break;
    }
    result.log.push_back({k, current.f, gnorm, step});
    result.z = std::move(trial);
    current = evaluate(result.z);
  }
  return result;
}

DescentResult gradient_descent(const ConstrainedProblem& problem, const Vector& z0, double step,
                               int iters, double tol) {
  int iterate = 0;
  auto guarded = [&](auto&& fn) {
    try {
      return fn();
    } catch (const NumericalError& e) {
      throw NumericalError("gradient_descent: failure at iterate " + std::to_string(iterate) +
                           ": " + e.what());
    }
  };
  auto objective = [&](const Vector& z) {
    return guarded([&] { return reduced_objective(problem, z); });
  };
  auto evaluate = [&](const Vector& z) {
    return guarded([&] {
      const ReducedGradientReport r = reduced_gradient(problem, z);
      ++iterate;
      return Evaluation{r.f_value, r.gradient};
    });
  };
  DescentOptions options;
  options.step = step;
  options.iters = iters;
  options.tol = tol;
  return armijo_descent(objective, evaluate, z0, options);
}

KktResiduals kkt_residuals(const ConstrainedProblem& problem, const Vector& u, const Vector& y,
                           const Vector& z) {
  if (u.size() != problem.state_dim() || z.size() != problem.control_dim())
    throw InvalidArgument("kkt_residuals: inconsistent dimensions");
  const Matrix duc = assemble_DuC(problem, u, z);
  if (y.size() != duc.rows()) throw InvalidArgument("kkt_residuals: adjoint has the wrong length");
  KktResiduals out;
  out.forward = problem.residual(u, z).norm();
  out.adjoint = (problem.grad_u_f(u, z) + duc.transpose() * y).norm();
  out.control = (problem.grad_z_f(u, z) + problem.apply_DzC_adjoint(u, z, y)).norm();
  return out;
}

double adjoint_solve_defect(const ConstrainedProblem& problem, const Vector& u, const Vector& z,
                            int trials, std::uint64_t seed) {
  Lcg rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector du = rng.uniform_vector(problem.state_dim());
    const Vector r = rng.uniform_vector(problem.state_dim());
    const Vector y = problem.solve_DuC_adjoint(u, z, r);
    const double lhs = problem.apply_DuC(u, z, du).dot(y);
    worst = std::max(worst, std::abs(lhs - du.dot(r)) / (du.norm() * r.norm()));
  }
  return worst;
}

double linearization_defect(const ConstrainedProblem& problem, const Vector& u, const Vector& z,
                            double h, int trials, std::uint64_t seed) {
  Lcg rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector du = rng.uniform_vector(problem.state_dim());
    const Vector exact = problem.apply_DuC(u, z, du);
    const Vector fd =
        (problem.residual(u + h * du, z) - problem.residual(u - h * du, z)) / (2.0 * h);
    const double scale = std::max(exact.norm(), 1e-300);
    worst = std::max(worst, (fd - exact).norm() / scale);
  }
  return worst;
}

LinearQuadraticProblem::LinearQuadraticProblem(Matrix b, double control_cost, bool state_cost)
    : b_(std::move(b)), control_cost_(control_cost), state_cost_(state_cost) {
  if (b_.rows() < 1 || b_.cols() < 1)
    throw InvalidArgument("LinearQuadraticProblem: B must be non-empty");
}

Vector LinearQuadraticProblem::residual(const Vector& u, const Vector& z) const {
  return u - b_ * z;
}

Vector LinearQuadraticProblem::solve_forward(const Vector& z) const { return b_ * z; }

Vector LinearQuadraticProblem::apply_DuC(const Vector&, const Vector&, const Vector& du) const {
  return du;
}

Vector LinearQuadraticProblem::apply_DzC(const Vector&, const Vector&, const Vector& dz) const {
  return -(b_ * dz);
}

Vector LinearQuadraticProblem::apply_DzC_adjoint(const Vector&, const Vector&,
                                                 const Vector& y) const {
  return -(b_.transpose() * y);
}

double LinearQuadraticProblem::objective(const Vector& u, const Vector& z) const {
  return (state_cost_ ? 0.5 * u.squaredNorm() : 0.0) + 0.5 * control_cost_ * z.squaredNorm();
}

Vector LinearQuadraticProblem::grad_u_f(const Vector& u, const Vector&) const {
  return state_cost_ ? u : Vector(Vector::Zero(u.size()));
}

Vector LinearQuadraticProblem::grad_z_f(const Vector&, const Vector& z) const {
  return control_cost_ * z;
}

void ProblemRegistry::add(const std::string& name, Builder builder) {
  builders_[name] = std::move(builder);
}

bool ProblemRegistry::contains(const std::string& name) const {
  return builders_.count(name) != 0;
}

std::unique_ptr<ConstrainedProblem> ProblemRegistry::create(const std::string& name,
                                                            const ProblemOptions& options) const {
  const auto it = builders_.find(name);
  if (it == builders_.end()) throw InvalidArgument("unknown problem '" + name + "'");
  return it->second(options);
}

std::vector<std::string> ProblemRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, builder] : builders_) out.push_back(name);
  return out;
}

}  // namespace adjointkit
