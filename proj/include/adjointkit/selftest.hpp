#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace adjointkit {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  /// Run only this suite; all when empty.
  std::optional<std::string> suite;
  std::uint64_t seed = 42;
  /// Negative control: perturb the adjoint under test by one entry.
  bool corrupt_adjoint = false;
};

/// adjoint, gradient, hurwitz, sturm.
std::vector<std::string> selftest_suites();

/// Throws InvalidArgument for an unknown suite name.
std::vector<SuiteResult> run_selftest(const SelftestOptions& options);

}  // namespace adjointkit
