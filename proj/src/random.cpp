#include "cifuse/random.hpp"

#include <cmath>

namespace cifuse {

Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x43494655u};
  return Rng(seq);
}

Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
  }
  return m;
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

Matrix random_orthogonal(Rng& rng, Eigen::Index n) {
  const Matrix g = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  return q;
}

SymMatrix random_spd(Rng& rng, Eigen::Index n, double lo, double hi) {
  const Matrix q = random_orthogonal(rng, n);
  Vector d(n);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = std::exp(llo + (lhi - llo) * uniform01(rng));
  return SymMatrix(q * d.asDiagonal() * q.transpose());
}

Matrix random_full_row_rank(Rng& rng, Eigen::Index p, Eigen::Index n) {
  for (;;) {
    Matrix h = gaussian_matrix(rng, p, n);
    Eigen::JacobiSVD<Matrix> svd(h);
    const Vector& s = svd.singularValues();
    if (s(s.size() - 1) > 1e-3 * s(0)) return h;
  }
}

Matrix random_contraction(Rng& rng, Eigen::Index rows, Eigen::Index cols, double sigma) {
  if (rows == 0 || cols == 0) return Matrix::Zero(rows, cols);
  const Matrix g = gaussian_matrix(rng, rows, cols);
  return (sigma / sigma_max(g)) * g;
}

}  // namespace cifuse
