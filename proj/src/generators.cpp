#include "adjointkit/generators.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace adjointkit::gen {

Matrix spd_matrix(Lcg& rng, Index n) {
  const Matrix l = rng.uniform_matrix(n, n);
  return l * l.transpose() + 0.5 * Matrix::Identity(n, n);
}

InnerProductSpace mixed_space(Lcg& rng, Index n) {
  switch (rng.uniform_int(0, 2)) {
    case 0:
      return InnerProductSpace(n);
    case 1:
      return InnerProductSpace::weighted(rng.uniform_vector(n, 0.2, 3.0));
    default:
      return InnerProductSpace(spd_matrix(rng, n));
  }
}

DenseOperator mixed_operator(Lcg& rng, Index max_rows, Index max_cols) {
  const Index m = rng.uniform_int(1, static_cast<int>(max_rows));
  const Index n = rng.uniform_int(1, static_cast<int>(max_cols));
  InnerProductSpace dom = mixed_space(rng, n);
  InnerProductSpace cod = mixed_space(rng, m);
  return DenseOperator(std::move(dom), std::move(cod), rng.uniform_matrix(m, n));
}

Matrix low_rank_matrix(Lcg& rng, Index m, Index n) {
  const Index r = rng.uniform_int(0, static_cast<int>(std::min(m, n)));
  if (r == 0) return Matrix::Zero(m, n);
  return rng.uniform_matrix(m, r) * rng.uniform_matrix(r, n);
}

Matrix constructed_matrix(Lcg& rng, Index n, bool stable) {
  for (;;) {
    Matrix d = Matrix::Zero(n, n);
    std::vector<double> real_parts;
    Index i = 0;
    while (i < n) {
      const double magnitude = rng.uniform(0.2, 2.0);
      const double re = stable || rng.uniform() < 0.5 ? -magnitude : magnitude;
      if (i + 1 < n && rng.uniform() < 0.4) {
        const double im = rng.uniform(0.3, 2.0);
        d(i, i) = re;
        d(i + 1, i + 1) = re;
        d(i, i + 1) = im;
        d(i + 1, i) = -im;
        real_parts.push_back(re);
        real_parts.push_back(re);
        i += 2;
      } else {
        d(i, i) = re;
        real_parts.push_back(re);
        ++i;
      }
    }
    bool any_positive = false;
    bool separated = true;
    for (std::size_t a = 0; a < real_parts.size(); ++a) {
      any_positive = any_positive || real_parts[a] > 0.0;
      for (std::size_t b = a; b < real_parts.size(); ++b)
        if (std::abs(real_parts[a] + real_parts[b]) < 0.1) separated = false;
    }
    if (!stable && !any_positive) continue;
    if (!separated) continue;
    const Matrix s = Matrix::Identity(n, n) + 0.4 * rng.uniform_matrix(n, n);
    Eigen::JacobiSVD<Matrix> sv(s);
    const Vector sig = sv.singularValues();
    if (sig(sig.size() - 1) < 1e-3 * sig(0) || sig(0) / sig(sig.size() - 1) > 50.0) continue;
    return s * d * s.inverse();
  }
}

}  // namespace adjointkit::gen
