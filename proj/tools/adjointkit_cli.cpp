// adjointkit command-line driver.
//
// Results go to stdout, or to --out when given. Output is buffered and only
// emitted once the command has succeeded, so a failing run never leaves a
// partial result behind.
//
// Exit status: 0 success, 2 invalid input, 3 numerical failure (a diagnostic
// JSON object is printed on stdout).

#include "adjointkit/adjoint_optim.hpp"
#include "adjointkit/backprop.hpp"
#include "adjointkit/inverse.hpp"
#include "adjointkit/io.hpp"
#include "adjointkit/pde_models.hpp"
#include "adjointkit/selftest.hpp"
#include "adjointkit/spectral.hpp"
#include "adjointkit/stability.hpp"
#include "adjointkit/sturm.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

using namespace adjointkit;
using io::Json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Output {
  std::ostringstream text;
  int status = 0;
};

std::vector<Index> parse_sizes(const std::string& spec) {
  std::string list = spec;
  if (list.rfind("sizes=", 0) == 0) list = list.substr(6);
  std::vector<Index> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      sizes.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw InvalidArgument("--spec: bad layer size '" + item + "'");
    }
  }
  if (sizes.size() < 2) throw InvalidArgument("--spec: need at least input and output sizes");
  return sizes;
}

Vector parse_point(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("--eq: bad coordinate '" + item + "'");
    }
  }
  if (values.empty()) throw InvalidArgument("--eq: empty point");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Vector load_vector(const std::string& path) { return io::vector_from_json(io::read_json_file(path)); }

DenseOperator load_operator(const std::string& path) {
  return io::operator_from_json(io::read_json_file(path));
}

void require_codomain(const DenseOperator& op, const Vector& y) {
  if (y.size() != op.rows()) throw InvalidArgument("--y: length does not match operator rows");
}

// --- subcommands -----------------------------------------------------------

struct AdjointCheckArgs {
  std::string op;
  int trials = 20;
};

void run_adjoint_check(const AdjointCheckArgs& a, Output& out) {
  const DenseOperator op = load_operator(a.op);
  const AdjointReport r = adjoint_consistency_check(op, a.trials, seed_from_environment());
  Json j;
  j["trials"] = r.trials;
  j["max_defect"] = r.max_defect;
  j["consistent"] = r.max_defect <= 1e-10;
  j["adjoint"] = io::operator_to_json(adjoint(op));
  out.text << j.dump() << '\n';
}

struct SvdArgs {
  std::string op;
  std::optional<double> rank_tol;
};

void run_svd(const SvdArgs& a, Output& out) {
  const DenseOperator op = load_operator(a.op);
  const SvdResult s = svd(op, a.rank_tol.value_or(kDefaultRankTol));
  Json j;
  j["sigma"] = io::vector_to_json(s.sigma);
  j["rank"] = s.rank;
  j["U"] = io::matrix_to_json(s.right_vectors);
  j["V"] = io::matrix_to_json(s.left_vectors);
  out.text << j.dump() << '\n';
  std::string sigma_line;
  for (Index i = 0; i < s.sigma.size(); ++i) {
    if (i > 0) sigma_line += ',';
    sigma_line += io::fixed(s.sigma(i), 4);
  }
  out.text << "sigma: " << sigma_line << '\n';
  out.text << "subspaces: dim R(A)=" << s.rank << " dim N(A)=" << op.cols() - s.rank
           << " dim R(A*)=" << s.rank << " dim N(A*)=" << op.rows() - s.rank << '\n';
}

struct SolveArgs {
  std::string op;
  std::string y;
  std::optional<double> rank_tol;
  double solvability_tol = 1e-10;
};

void run_solve(const SolveArgs& a, Output& out) {
  const DenseOperator op = load_operator(a.op);
  const Vector y = load_vector(a.y);
  require_codomain(op, y);
  const SvdResult s = svd(op, a.rank_tol.value_or(kDefaultRankTol));
  const Vector x = pseudo_inverse_apply(s, op, y);
  const Solvability sol = solvability_check(op, y, a.solvability_tol);
  Json j;
  j["x"] = io::vector_to_json(x);
  j["residual_norm"] = op.codomain().norm(op.apply(x) - y);
  j["solvable"] = sol.solvable;
  j["defect"] = sol.defect;
  j["rank"] = s.rank;
  out.text << j.dump() << '\n';
}

struct TikhonovArgs {
  std::string op;
  std::string y;
  double kappa = 1e-4;
  std::optional<std::string> x0;
};

void run_tikhonov(const TikhonovArgs& a, Output& out) {
  const DenseOperator op = load_operator(a.op);
  const Vector y = load_vector(a.y);
  require_codomain(op, y);
  const Vector x0 = a.x0 ? load_vector(*a.x0) : Vector::Zero(op.cols());
  if (x0.size() != op.cols()) throw InvalidArgument("--x0: length does not match operator cols");
  const TikhonovSolution t = tikhonov_solve(op, y, a.kappa, x0);
  Json j;
  j["x"] = io::vector_to_json(t.x);
  j["kappa"] = t.kappa;
  j["residual_norm"] = t.residual_norm;
  j["prior_distance"] = t.prior_distance;
  j["optimality_residual"] = tikhonov_optimality_residual(op, y, a.kappa, x0, t.x);
  out.text << j.dump() << '\n';
}

struct PicardArgs {
  std::string op;
  std::string y;
};

void run_picard(const PicardArgs& a, Output& out) {
  const DenseOperator op = load_operator(a.op);
  const Vector y = load_vector(a.y);
  require_codomain(op, y);
  out.text << io::picard_csv(picard_diagnostic(op, y));
}

struct TrainArgs {
  std::string spec = "sizes=2,4,1";
  std::string act = "tanh";
  std::string data;
  int iters = 100;
  double step = 0.1;
  double tol = 1e-8;
};

void run_train(const TrainArgs& a, Output& out) {
  nn::NetworkSpec spec{parse_sizes(a.spec), nn::parse_activation(a.act)};
  spec.validate();
  const Json data = io::read_json_file(a.data);
  if (!data.is_array() || data.empty()) throw InvalidArgument("--data: expected a non-empty list of samples");
  std::vector<nn::Sample> samples;
  for (const auto& item : data) {
    if (!item.is_object() || !item.contains("x") || !item.contains("a_obs"))
      throw InvalidArgument("--data: each sample needs \"x\" and \"a_obs\"");
    nn::Sample s{io::vector_from_json(item["x"]), io::vector_from_json(item["a_obs"])};
    if (s.x.size() != spec.input_size() || s.a_obs.size() != spec.output_size())
      throw InvalidArgument("--data: sample sizes do not match --spec");
    samples.push_back(std::move(s));
  }
  Lcg rng(seed_from_environment());
  const nn::Parameters initial = nn::Parameters::random(spec, rng);
  const nn::TrainResult r = nn::train(spec, initial, samples, a.step, a.iters, a.tol);
  out.text << std::setprecision(17) << "k,loss,grad_norm,step\n";
  for (const auto& s : r.descent.log)
    out.text << s.k << ',' << s.f << ',' << s.grad_norm << ',' << s.step << '\n';
}

struct StabilityArgs {
  std::string model = "damped";
  std::optional<std::string> eq;
};

void run_stability(const StabilityArgs& a, Output& out) {
  stability::VectorField field;
  Vector x_eq;
  std::optional<stability::models::Seirs> seirs;
  if (a.model == "damped") {
    field = stability::models::damped_oscillator();
    x_eq = Vector::Zero(2);
  } else if (a.model == "logistic") {
    field = stability::models::logistic();
    x_eq = Vector::Zero(1);
  } else if (a.model == "seirs") {
    seirs.emplace();
    field = seirs->field();
    x_eq = seirs->disease_free_equilibrium();
  } else {
    const Matrix m = io::matrix_from_json(io::read_json_file(a.model));
    if (m.rows() != m.cols()) throw InvalidArgument("--model: matrix must be square");
    field = [m](const Vector& x) -> Vector { return m * x; };
    x_eq = Vector::Zero(m.rows());
  }
  if (a.eq) x_eq = parse_point(*a.eq);
  const stability::StabilityReport r = stability::stability_verdict(field, x_eq);
  Json j;
  j["hurwitz"] = r.hurwitz;
  j["routh_margin"] = r.routh_margin;
  j["spd_certificate"] = r.spd_certificate;
  if (std::isfinite(r.spectral_abscissa_bound))
    j["spectral_abscissa_bound"] = r.spectral_abscissa_bound;
  else
    j["spectral_abscissa_bound"] = nullptr;
  j["equilibrium"] = io::vector_to_json(x_eq);
  j["jacobian"] = io::matrix_to_json(r.jacobian);
  if (r.lyapunov_P) j["P"] = io::matrix_to_json(*r.lyapunov_P);
  if (seirs) {
    const stability::R0Result r0 =
        stability::r0(seirs->new_infections(), seirs->transitions());
    j["r0"] = r0.r0;
  }
  out.text << j.dump() << '\n';
}

struct R0Args {
  std::string f;
  std::string v;
};

void run_r0(const R0Args& a, Output& out) {
  const Matrix f = io::matrix_from_json(io::read_json_file(a.f));
  const Matrix v = io::matrix_from_json(io::read_json_file(a.v));
  const stability::R0Result r = stability::r0(f, v);
  Json j;
  j["r0"] = r.r0;
  j["iterations"] = r.iterations;
  j["nonnegative"] = r.nonnegative;
  if (!r.warning.empty()) j["warning"] = r.warning;
  out.text << j.dump() << '\n';
}

struct SturmArgs {
  std::string bc = "dirichlet";
  Index n = 63;
  Index modes = 5;
};

void run_sturm(const SturmArgs& a, Output& out) {
  sturm::SLProblem problem;
  problem.bc = sturm::parse_boundary(a.bc);
  problem.n = a.n;
  const sturm::Discretization disc = sturm::discretize(problem);
  const sturm::ModeSet m = sturm::solve_modes(disc, a.modes);
  out.text << std::setprecision(17) << "mode,lambda,x,v\n";
  for (Index k = 0; k < m.eigenvalues.size(); ++k)
    for (Index i = 0; i < m.x.size(); ++i)
      out.text << k + 1 << ',' << m.eigenvalues(k) << ',' << m.x(i) << ',' << m.modes(i, k) << '\n';
}

struct PdeArgs {
  std::string problem = "advection";
  Index n = 32;
  double beta = 1.0;
  double g0 = 0.0;
  double g1 = 1.0;
  double kappa = 0.0;
  double z = 1.0;
  bool check_gradient = false;
  bool descend = false;
  int iters = 200;
  std::optional<double> step;
  double tol = 1e-10;
};

Vector initial_control(const PdeArgs& a, const ConstrainedProblem& p) {
  if (a.problem == "advection") return Vector::Constant(1, a.z);
  if (a.problem == "elliptic") return Vector::Zero(p.control_dim());
  return Vector::Constant(p.control_dim(), a.z);
}

// Fields on the state grid: advection uses the nodes, elliptic the nodes with
// the Dirichlet values attached, other problems the state index. A gradient
// entry belongs to the cell (or boundary point) starting at that row; rows
// without one leave the column empty.
void write_fields(const PdeArgs& a, const ConstrainedProblem& p, const ReducedGradientReport& g,
                  std::ostream& os) {
  os << std::setprecision(17) << "x,u,v,grad\n";
  auto row = [&](double x, double u, double v, std::optional<double> grad) {
    os << x << ',' << u << ',' << v << ',';
    if (grad) os << *grad;
    os << '\n';
  };
  if (const auto* adv = dynamic_cast<const pde::AdvectionProblem*>(&p)) {
    const Vector x = adv->grid();
    const Vector v = adv->adjoint_field(g.adjoint);
    for (Index i = 0; i < x.size(); ++i)
      row(x(i), g.state(i), v(i), i == 0 ? std::optional<double>(g.gradient(0)) : std::nullopt);
    return;
  }
  if (const auto* ell = dynamic_cast<const pde::EllipticProblem*>(&p)) {
    const Index n = ell->state_dim();
    for (Index i = 0; i <= n + 1; ++i) {
      const double x = static_cast<double>(i) * ell->h();
      const double u = i == 0 ? ell->g0() : i == n + 1 ? ell->g1() : g.state(i - 1);
      const double v = i == 0 || i == n + 1 ? 0.0 : g.adjoint(i - 1);
      row(x, u, v, i <= n ? std::optional<double>(g.gradient(i)) : std::nullopt);
    }
    return;
  }
  (void)a;
  const Index rows = std::max(p.state_dim(), p.control_dim());
  for (Index i = 0; i < rows; ++i)
    row(static_cast<double>(i), i < p.state_dim() ? g.state(i) : 0.0,
        i < p.state_dim() ? g.adjoint(i) : 0.0,
        i < p.control_dim() ? std::optional<double>(g.gradient(i)) : std::nullopt);
}

void run_pdeopt(const PdeArgs& a, Output& out) {
  const ProblemRegistry registry = pde::builtin_problems();
  if (!registry.contains(a.problem)) throw InvalidArgument("--problem: unknown problem '" + a.problem + "'");
  ProblemOptions options;
  options.n = a.n;
  options.beta = a.beta;
  options.g0 = a.g0;
  options.g1 = a.g1;
  options.kappa = a.kappa;
  options.seed = seed_from_environment();
  const auto problem = registry.create(a.problem, options);
  const Vector z0 = initial_control(a, *problem);

  if (a.check_gradient) {
    const FdCheckResult r = fd_gradient_check(*problem, z0, {1e-3, 1e-4, 1e-5, 1e-6, 1e-7});
    out.text << std::setprecision(17) << "h,rel_error\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i)
      out.text << r.steps[i] << ',' << r.rel_errors[i] << '\n';
    return;
  }
  if (a.descend) {
    double step = a.step.value_or(1.0);
    if (!a.step && a.problem == "advection") step = a.beta * a.beta;
    if (!a.step && a.problem == "elliptic") step = pde::kEllipticDescentStep;
    const DescentResult r = gradient_descent(*problem, z0, step, a.iters, a.tol);
    out.text << std::setprecision(17) << "k,f,grad_norm,step\n";
    for (const auto& s : r.log) out.text << s.k << ',' << s.f << ',' << s.grad_norm << ',' << s.step << '\n';
    return;
  }
  write_fields(a, *problem, reduced_gradient(*problem, z0), out.text);
}

struct SelftestArgs {
  std::optional<std::string> suite;
  bool corrupt_adjoint = false;
};

void run_selftest_cmd(const SelftestArgs& a, Output& out) {
  SelftestOptions options;
  options.suite = a.suite;
  options.corrupt_adjoint = a.corrupt_adjoint;
  options.seed = seed_from_environment();
  bool all = true;
  for (const auto& r : run_selftest(options)) {
    out.text << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  out.status = all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adjointkit: adjoint-based operators, inverse problems and stability tools"};
  app.require_subcommand(1);
  std::optional<std::string> out_path;
  app.add_option("--out", out_path, "Write results to this file instead of stdout");

  std::function<void(Output&)> action;
  auto positive = CLI::PositiveNumber;

  AdjointCheckArgs adj;
  auto* c = app.add_subcommand("adjoint-check", "Check A* against the weighted inner products");
  c->add_option("--op", adj.op, "Operator JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--trials", adj.trials, "Random probe pairs")->check(positive);
  c->callback([&] { action = [&](Output& o) { run_adjoint_check(adj, o); }; });

  SvdArgs sv;
  c = app.add_subcommand("svd", "Singular system and fundamental subspaces");
  c->add_option("--op", sv.op, "Operator JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--rank-tol", sv.rank_tol, "Absolute rank threshold")->check(positive);
  c->callback([&] { action = [&](Output& o) { run_svd(sv, o); }; });

  SolveArgs so;
  c = app.add_subcommand("solve", "Minimum-norm least-squares solution");
  c->add_option("--op", so.op, "Operator JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--y", so.y, "Right-hand side JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--rank-tol", so.rank_tol, "Absolute rank threshold")->check(positive);
  c->add_option("--tol", so.solvability_tol, "Solvability tolerance")->check(positive);
  c->callback([&] { action = [&](Output& o) { run_solve(so, o); }; });

  TikhonovArgs tk;
  c = app.add_subcommand("tikhonov", "Tikhonov-regularized solution");
  c->add_option("--op", tk.op, "Operator JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--y", tk.y, "Right-hand side JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--kappa", tk.kappa, "Regularization weight")->check(positive);
  c->add_option("--x0", tk.x0, "Prior JSON")->check(CLI::ExistingFile);
  c->callback([&] { action = [&](Output& o) { run_tikhonov(tk, o); }; });

  PicardArgs pc;
  c = app.add_subcommand("picard", "Picard coefficient table as CSV");
  c->add_option("--op", pc.op, "Operator JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--y", pc.y, "Right-hand side JSON")->required()->check(CLI::ExistingFile);
  c->callback([&] { action = [&](Output& o) { run_picard(pc, o); }; });

  TrainArgs tr;
  c = app.add_subcommand("train", "Train a feedforward network by adjoint gradients");
  c->add_option("--spec", tr.spec, "Layer sizes, e.g. sizes=2,4,1");
  c->add_option("--act", tr.act, "Activation: tanh, identity or logistic");
  c->add_option("--data", tr.data, "Samples JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--iters", tr.iters, "Iterations")->check(CLI::NonNegativeNumber);
  c->add_option("--step", tr.step, "Initial step")->check(positive);
  c->add_option("--tol", tr.tol, "Gradient-norm tolerance")->check(positive);
  c->callback([&] { action = [&](Output& o) { run_train(tr, o); }; });

  StabilityArgs st;
  c = app.add_subcommand("stability", "Routh-Hurwitz and Lyapunov verdict at an equilibrium");
  c->add_option("--model", st.model, "damped, logistic, seirs or a matrix JSON file");
  c->add_option("--eq", st.eq, "Equilibrium, comma separated");
  c->callback([&] { action = [&](Output& o) { run_stability(st, o); }; });

  R0Args r0a;
  c = app.add_subcommand("r0", "Basic reproduction number from a next-generation splitting");
  c->add_option("--F", r0a.f, "New-infection matrix JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--V", r0a.v, "Transition matrix JSON")->required()->check(CLI::ExistingFile);
  c->callback([&] { action = [&](Output& o) { run_r0(r0a, o); }; });

  SturmArgs sl;
  c = app.add_subcommand("sturm", "Sturm-Liouville eigenpairs as CSV");
  c->add_option("--bc", sl.bc, "dirichlet, neumann or periodic");
  c->add_option("--n", sl.n, "Grid size")->check(positive);
  c->add_option("--modes", sl.modes, "Number of modes")->check(positive);
  c->callback([&] { action = [&](Output& o) { run_sturm(sl, o); }; });

  PdeArgs pd;
  c = app.add_subcommand("pdeopt", "Reduced gradients and descent for the PDE-constrained problems");
  c->add_option("--problem", pd.problem, "advection, elliptic or lq-toy");
  c->add_option("--n", pd.n, "Grid size")->check(positive);
  c->add_option("--beta", pd.beta, "Advection velocity")->check(positive);
  c->add_option("--g0", pd.g0, "Left boundary value");
  c->add_option("--g1", pd.g1, "Right boundary value");
  c->add_option("--kappa", pd.kappa, "Tikhonov weight on the control")->check(CLI::NonNegativeNumber);
  c->add_option("--z", pd.z, "Initial scalar control (advection, lq-toy)");
  c->add_flag("--check-gradient", pd.check_gradient, "Compare with central differences");
  c->add_flag("--descend", pd.descend, "Run gradient descent and log it");
  c->add_option("--iters", pd.iters, "Descent iterations")->check(CLI::NonNegativeNumber);
  c->add_option("--step", pd.step, "Initial descent step")->check(positive);
  c->add_option("--tol", pd.tol, "Gradient-norm tolerance")->check(positive);
  c->callback([&] { action = [&](Output& o) { run_pdeopt(pd, o); }; });

  SelftestArgs sf;
  c = app.add_subcommand("selftest", "Cross-module invariant suites");
  c->add_option("--suite", sf.suite, "adjoint, gradient, hurwitz or sturm");
  c->add_flag("--corrupt-adjoint", sf.corrupt_adjoint)->group("");
  c->callback([&] { action = [&](Output& o) { run_selftest_cmd(sf, o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  Output result;
  try {
    action(result);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    Json diag;
    diag["error"] = "numerical";
    diag["message"] = e.what();
    std::cout << diag.dump() << '\n';
    return kExitNumerical;
  }

  if (out_path) {
    std::ofstream file(*out_path);
    if (!file) {
      std::cerr << "error: cannot write " << *out_path << '\n';
      return kExitValidation;
    }
    file << result.text.str();
  } else {
    std::cout << result.text.str();
  }
  return result.status;
}
