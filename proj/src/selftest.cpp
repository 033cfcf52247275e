#include "adjointkit/selftest.hpp"

#include "adjointkit/adjoint_optim.hpp"
#include "adjointkit/backprop.hpp"
#include "adjointkit/generators.hpp"
#include "adjointkit/io.hpp"
#include "adjointkit/pde_models.hpp"
#include "adjointkit/stability.hpp"
#include "adjointkit/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace adjointkit {

namespace {

SuiteResult adjoint_suite(const SelftestOptions& o) {
  Lcg rng(o.seed);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const DenseOperator op = gen::mixed_operator(rng, 8, 8);
    DenseOperator candidate = adjoint(op);
    if (o.corrupt_adjoint) {
      Matrix e = candidate.entries();
      e(0, 0) += 1e-3 * (1.0 + std::abs(e(0, 0)));
      candidate = DenseOperator(candidate.domain(), candidate.codomain(), e);
    }
    worst = std::max(worst, adjoint_consistency_check(op, candidate, 10, o.seed + t).max_defect);
  }
  return {"adjoint", worst <= 1e-10, "max normalized defect " + io::sci(worst)};
}

SuiteResult gradient_suite(const SelftestOptions& o) {
  Lcg rng(o.seed);
  const Index n = 15;
  const pde::EllipticProblem elliptic(n, 0.0, 1.0, pde::elliptic_reference_data(n, 0.0, 1.0));
  const Vector z = rng.uniform_vector(n + 1, -0.5, 0.5);
  const double e_pde = fd_gradient_check(elliptic, z, {1e-5}).rel_errors.front();

  nn::NetworkSpec spec{{3, 5, 2}, nn::Activation::tanh};
  const nn::Parameters params = nn::Parameters::random(spec, rng);
  const auto net = nn::as_constrained_problem(spec, rng.uniform_vector(3), rng.uniform_vector(2));
  const double e_nn = fd_gradient_check(*net, params.flatten(), {1e-6}).rel_errors.front();

  const bool ok = e_pde <= 1e-5 && e_nn <= 1e-6;
  return {"gradient", ok,
          "elliptic fd rel err " + io::sci(e_pde) + ", network " +
              io::sci(e_nn)};
}

SuiteResult hurwitz_suite(const SelftestOptions& o) {
  Lcg rng(o.seed);
  int disagreements = 0;
  for (int t = 0; t < 10; ++t) {
    const Index n = rng.uniform_int(2, 5);
    const Matrix a = gen::constructed_matrix(rng, n, t % 2 == 0);
    const bool routh = stability::hurwitz_check(a).hurwitz;
    bool certified = false;
    try {
      certified = stability::is_spd(stability::lyapunov_solve(a, Matrix::Identity(n, n)));
    } catch (const NumericalError&) {
      certified = false;
    }
    if (routh != certified || routh != (t % 2 == 0)) ++disagreements;
  }
  return {"hurwitz", disagreements == 0, std::to_string(disagreements) + " disagreements in 10"};
}

SuiteResult sturm_suite(const SelftestOptions&) {
  sturm::SLProblem problem;
  problem.n = 63;
  const sturm::Discretization disc = sturm::discretize(problem);
  const sturm::ModeSet modes = sturm::solve_modes(disc, 10);
  double worst = 0.0;
  for (Index j = 0; j < modes.eigenvalues.size(); ++j) {
    const double exact = sturm::dirichlet_discrete_eigenvalue(j + 1, disc.h);
    worst = std::max(worst, std::abs(modes.eigenvalues(j) - exact) / exact);
  }
  return {"sturm", worst <= 1e-9, "max relative eigenvalue error " + io::sci(worst)};
}

using Suite = std::function<SuiteResult(const SelftestOptions&)>;

const std::vector<std::pair<std::string, Suite>>& registry() {
  static const std::vector<std::pair<std::string, Suite>> suites = {
      {"adjoint", adjoint_suite},
      {"gradient", gradient_suite},
      {"hurwitz", hurwitz_suite},
      {"sturm", sturm_suite},
  };
  return suites;
}

}  // namespace

std::vector<std::string> selftest_suites() {
  std::vector<std::string> names;
  for (const auto& [name, suite] : registry()) names.push_back(name);
  return names;
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
  if (options.suite) {
    const auto names = selftest_suites();
    if (std::find(names.begin(), names.end(), *options.suite) == names.end())
      throw InvalidArgument("unknown suite: " + *options.suite);
  }
  std::vector<SuiteResult> results;
  for (const auto& [name, suite] : registry()) {
    if (options.suite && *options.suite != name) continue;
    try {
      results.push_back(suite(options));
    } catch (const std::exception& e) {
      results.push_back({name, false, std::string("exception: ") + e.what()});
    }
  }
  return results;
}

}  // namespace adjointkit
