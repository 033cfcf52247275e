#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace adjointkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Bad shapes, bad flags, violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Singular systems, failed factorizations, non-convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seeded 64-bit linear congruential generator (Knuth's MMIX constants).
/// Uniform draws take the top 53 bits, so every report built from it is
/// bit-reproducible across platforms and standard libraries.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Vector uniform_vector(Index n, double lo = -1.0, double hi = 1.0);
  Matrix uniform_matrix(Index rows, Index cols, double lo = -1.0, double hi = 1.0);
  /// Integer in [lo, hi].
  int uniform_int(int lo, int hi);

 private:
  std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL,
                                  1442695040888963407ULL, 0ULL>
      engine_;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// ADJOINTKIT_SEED if set and parseable, otherwise kDefaultSeed.
std::uint64_t seed_from_environment();

}  // namespace adjointkit
