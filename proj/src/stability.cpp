#include "adjointkit/stability.hpp"

#include "adjointkit/kernels.hpp"
#include "adjointkit/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace adjointkit::stability {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw InvalidArgument(std::string(what) + ": matrix must be square and non-empty");
}

}  // namespace

Matrix lyapunov_solve(const Matrix& a, const Matrix& q) {
  require_square(a, "lyapunov_solve");
  const Index n = a.rows();
  if (n > kMaxLyapunovDim) throw InvalidArgument("lyapunov_solve: n exceeds 64");
  if (q.rows() != n || q.cols() != n) throw InvalidArgument("lyapunov_solve: Q has the wrong shape");
  if (!is_spd(q)) throw InvalidArgument("lyapunov_solve: Q must be symmetric positive definite");

  const Matrix system = kernels::kron_sum_transpose(a);
  Eigen::PartialPivLU<Matrix> lu(system);
  if (!(lu.rcond() > 1e-13))
    throw NumericalError("lyapunov_solve: singular Kronecker system (A and -A share an eigenvalue)");
  const Vector rhs = -q.reshaped();
  Matrix p = lu.solve(rhs).reshaped(n, n);
  p = 0.5 * (p + p.transpose()).eval();
  if (!(lyapunov_residual(a, p, q) <= 1e-9 * q.norm()))
    throw NumericalError("lyapunov_solve: Kronecker system too ill-conditioned for a certificate");
  return p;
}

double lyapunov_residual(const Matrix& a, const Matrix& p, const Matrix& q) {
  return (p * a + a.transpose() * p + q).norm();
}

bool is_spd(const Matrix& p) {
  if (p.rows() != p.cols() || p.rows() < 1) return false;
  const double scale = std::max(p.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) return false;
  Eigen::LLT<Matrix> llt(0.5 * (p + p.transpose()));
  return llt.info() == Eigen::Success;
}

Vector characteristic_polynomial(const Matrix& a) {
  require_square(a, "characteristic_polynomial");
  const Index n = a.rows();
  Vector coeffs(n + 1);
  coeffs(0) = 1.0;
  Matrix m = Matrix::Identity(n, n);  // M₁
  for (Index k = 1; k <= n; ++k) {
    const Matrix am = a * m;
    coeffs(k) = -am.trace() / static_cast<double>(k);
    m = am + coeffs(k) * Matrix::Identity(n, n);
  }
  return coeffs;
}

RouthResult routh_hurwitz(const Vector& coefficients) {
  if (coefficients.size() < 2 || coefficients(0) == 0.0)
    throw InvalidArgument("routh_hurwitz: need a polynomial of degree >= 1 with nonzero leading term");
  const Index degree = coefficients.size() - 1;
  // Normalize so the leading coefficient is positive.
  const Vector c = coefficients(0) > 0.0 ? coefficients : Vector(-coefficients);
  const auto width = static_cast<std::size_t>(degree / 2 + 1);

  std::vector<double> prev(width, 0.0);
  std::vector<double> cur(width, 0.0);
  for (Index k = 0; k <= degree; ++k) {
    auto& row = (k % 2 == 0) ? prev : cur;
    row[static_cast<std::size_t>(k / 2)] = c(k);
  }

  RouthResult out;
  out.hurwitz = true;
  out.margin = std::numeric_limits<double>::infinity();
  auto row_scale = [](const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s = std::max(s, std::abs(v));
    return s;
  };
  const double coeff_scale = c.cwiseAbs().maxCoeff();

  auto visit = [&](double pivot, double scale) {
    out.first_column.push_back(pivot);
    out.margin = std::min(out.margin, std::abs(pivot));
    if (std::abs(pivot) <= 1e-10 * scale) {
      out.boundary = true;
      out.hurwitz = false;
      return false;
    }
    if (pivot < 0.0) out.hurwitz = false;
    return true;
  };

  if (!visit(prev[0], coeff_scale)) return out;
  if (!visit(cur[0], coeff_scale)) return out;
  for (Index k = 2; k <= degree; ++k) {
    const double scale = std::max(row_scale(prev), row_scale(cur));
    std::vector<double> next(width, 0.0);
    for (std::size_t j = 0; j + 1 < width; ++j)
      next[j] = (cur[0] * prev[j + 1] - prev[0] * cur[j + 1]) / cur[0];
    // Compare the new pivot against the magnitudes it was formed from.
    if (!visit(next[0], scale)) return out;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

RouthResult hurwitz_check(const Matrix& a) {
  require_square(a, "hurwitz_check");
  if (a.rows() > kMaxLyapunovDim) throw InvalidArgument("hurwitz_check: n exceeds 64");
  return routh_hurwitz(characteristic_polynomial(a));
}

Matrix linearize(const VectorField& f, const Vector& x_eq, double h) {
  const Vector f0 = f(x_eq);
  if (!(f0.norm() <= 1e-8))
    throw InvalidArgument("linearize: x_eq is not an equilibrium (|f(x_eq)| = " +
                          std::to_string(f0.norm()) + ")");
  if (!(h > 0.0)) h = 1e-5 * (1.0 + x_eq.norm());
  const Index n = x_eq.size();
  Matrix jac(f0.size(), n);
  for (Index j = 0; j < n; ++j) {
    Vector plus = x_eq;
    Vector minus = x_eq;
    plus(j) += h;
    minus(j) -= h;
    jac.col(j) = (f(plus) - f(minus)) / (2.0 * h);
  }
  return jac;
}

R0Result r0(const Matrix& f, const Matrix& v) {
  require_square(f, "r0");
  require_square(v, "r0");
  if (f.rows() != v.rows()) throw InvalidArgument("r0: F and V must have the same size");
  Eigen::FullPivLU<Matrix> lu(v);
  if (!lu.isInvertible()) throw NumericalError("r0: V is singular");
  const Matrix k = f * lu.inverse();
  const Index n = k.rows();

  R0Result out;
  const double kscale = k.cwiseAbs().maxCoeff();
  if ((k.array() < -1e-14 * std::max(kscale, 1.0)).any()) {
    out.nonnegative = false;
    out.warning = "FV^-1 has negative entries; spectral radius may not be a Perron root";
  }

  Vector x = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  constexpr int kMaxIters = 10000;
  for (int it = 1; it <= kMaxIters; ++it) {
    const Vector kx = k * x;
    const Vector y = kx + x;
    // Rayleigh quotient of K itself, so K = 0 reports exactly 0.
    const double lambda = x.dot(kx);
    out.iterations = it;
    // Stop on the eigen-residual of the current unit vector.
    if ((kx - lambda * x).norm() <= 1e-10 * std::abs(lambda + 1.0)) {
      out.r0 = lambda;
      return out;
    }
    const double ny = y.norm();
    if (ny == 0.0) throw NumericalError("r0: power iteration collapsed to zero");
    x = y / ny;
  }
  throw NumericalError("r0: power iteration did not converge in 10^4 iterations");
}

StabilityReport stability_verdict(const VectorField& f, const Vector& x_eq, double h) {
  StabilityReport report;
  report.jacobian = linearize(f, x_eq, h);
  require_square(report.jacobian, "stability_verdict");
  const RouthResult routh = hurwitz_check(report.jacobian);
  report.hurwitz = routh.hurwitz;
  report.routh_margin = routh.margin;

  const Index n = report.jacobian.rows();
  try {
    report.lyapunov_P = lyapunov_solve(report.jacobian, Matrix::Identity(n, n));
    report.spd_certificate = is_spd(*report.lyapunov_P);
  } catch (const NumericalError&) {
    report.spd_certificate = false;
  }
  if (report.spd_certificate != report.hurwitz)
    throw NumericalError("stability_verdict: Routh-Hurwitz and Lyapunov certificate disagree");

  report.spectral_abscissa_bound = std::numeric_limits<double>::infinity();
  if (report.spd_certificate) {
    const double p_max = jacobi_eigen_symmetric(*report.lyapunov_P).eigenvalues(0);
    report.spectral_abscissa_bound = -1.0 / (2.0 * p_max);
  }
  return report;
}

Trajectory simulate(const VectorField& f, const Vector& x0, double t_end, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("simulate: dt must be positive");
  if (!(t_end >= 0.0)) throw InvalidArgument("simulate: T must be nonnegative");
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
  Trajectory traj;
  traj.t.push_back(0.0);
  traj.x.push_back(x0);
  Vector x = x0;
  for (long s = 1; s <= steps; ++s) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite())
      throw NumericalError("simulate: non-finite state at step " + std::to_string(s));
    traj.t.push_back(static_cast<double>(s) * h);
    traj.x.push_back(x);
  }
  return traj;
}

namespace models {

VectorField damped_oscillator() {
  return [](const Vector& x) {
    if (x.size() != 2) throw InvalidArgument("damped oscillator: state must have 2 entries");
    Vector dx(2);
    dx << x(1), -x(0) - x(1);
    return dx;
  };
}

VectorField logistic() {
  return [](const Vector& x) {
    if (x.size() != 1) throw InvalidArgument("logistic: state must have 1 entry");
    return Vector(Vector::Constant(1, x(0) * (1.0 - x(0))));
  };
}

VectorField Seirs::field() const {
  const Seirs p = *this;
  return [p](const Vector& x) {
    if (x.size() != 4) throw InvalidArgument("SEIRS: state must have 4 entries");
    const double s = x(0), e = x(1), i = x(2), r = x(3);
    const double infection = p.beta * s * i;
    Vector dx(4);
    dx << p.mu - infection - p.mu * s + p.omega * r, infection - (p.sigma + p.mu) * e,
        p.sigma * e - (p.gamma + p.mu) * i, p.gamma * i - (p.omega + p.mu) * r;
    return dx;
  };
}

Vector Seirs::disease_free_equilibrium() const {
  Vector x = Vector::Zero(4);
  x(0) = 1.0;
  return x;
}

Matrix Seirs::new_infections() const {
  Matrix f = Matrix::Zero(2, 2);
  f(0, 1) = beta;
  return f;
}

Matrix Seirs::transitions() const {
  Matrix v(2, 2);
  v << sigma + mu, 0.0, -sigma, gamma + mu;
  return v;
}

double Seirs::r0_closed_form() const { return beta * sigma / ((sigma + mu) * (gamma + mu)); }

}  // namespace models

}  // namespace adjointkit::stability
