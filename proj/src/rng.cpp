#include "adjointkit/types.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace adjointkit {

double Lcg::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Vector Lcg::uniform_vector(Index n, double lo, double hi) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
  return v;
}

Matrix Lcg::uniform_matrix(Index rows, Index cols, double lo, double hi) {
  // Row-major fill order so the stream maps to the JSON entry order.
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
  return m;
}

int Lcg::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>((engine_() >> 11) % span);
}

std::uint64_t seed_from_environment() {
  const char* raw = std::getenv("ADJOINTKIT_SEED");
  if (raw == nullptr) return kDefaultSeed;
  std::uint64_t value = 0;
  const char* end = raw + std::strlen(raw);
  auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc{} || ptr != end) return kDefaultSeed;
  return value;
}

}  // namespace adjointkit
