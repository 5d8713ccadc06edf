#pragma once

#include <cstdint>

#include "cifuse/ci.hpp"
#include "cifuse/problem.hpp"
#include "cifuse/random.hpp"

namespace cifuse::testing {

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Random problem satisfying the rank conditions, n in [1, max_n].
inline FusionProblem random_problem(Rng& rng, Eigen::Index max_n = 5) {
  for (;;) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(uniform01(rng) * max_n);
    const Eigen::Index p1 = 1 + static_cast<Eigen::Index>(uniform01(rng) * n);
    Eigen::Index p2 = 1 + static_cast<Eigen::Index>(uniform01(rng) * n);
    if (p1 + p2 < n) p2 = n - p1;
    const Matrix h1 = random_full_row_rank(rng, p1, n);
    const Matrix h2 = random_full_row_rank(rng, p2, n);
    Matrix h(p1 + p2, n);
    h << h1, h2;
    Eigen::JacobiSVD<Matrix> svd(h);
    const Vector& s = svd.singularValues();
    if (s(n - 1) < 1e-2 * s(0)) continue;
    PartialEstimate e1{h1, gaussian_matrix(rng, p1, 1).col(0), random_spd(rng, p1, 0.1, 10.0)};
    PartialEstimate e2{h2, gaussian_matrix(rng, p2, 1).col(0), random_spd(rng, p2, 0.1, 10.0)};
    return FusionProblem(std::move(e1), std::move(e2));
  }
}

/// Random PD joint over the problem's two error blocks.
inline JointCovariance random_joint(Rng& rng, const FusionProblem& problem) {
  const SymMatrix j = random_spd(rng, problem.p1() + problem.p2(), 0.1, 10.0);
  const Eigen::Index p1 = problem.p1();
  const Eigen::Index p2 = problem.p2();
  return JointCovariance(SymMatrix(j.mat().topLeftCorner(p1, p1)),
                         j.mat().topRightCorner(p1, p2),
                         SymMatrix(j.mat().bottomRightCorner(p2, p2)));
}

/// `alpha`, or the endpoint the family forces when one Sigma dominates.
inline double admissible_alpha(const FusionProblem& problem, double alpha) {
  switch (loewner_compare(problem.sigma0(), problem.sigma1())) {
    case LoewnerRelation::StrictlyGreater: return 0.0;
    case LoewnerRelation::StrictlyLess: return 1.0;
    default: return alpha;
  }
}

/// H1 = H2 = I, P1 = I, P2 = diag(1.25, 0.1).
inline FusionProblem two_sensor_problem() {
  Vector d(2);
  d << 1.25, 0.1;
  return FusionProblem(
      PartialEstimate{Matrix::Identity(2, 2), Vector::Zero(2), SymMatrix::identity(2)},
      PartialEstimate{Matrix::Identity(2, 2), Vector::Zero(2), SymMatrix::diagonal(d)});
}

/// H1 = [1 0], H2 = [0 1], unit variances.
inline FusionProblem split_problem() {
  Matrix h1(1, 2);
  h1 << 1, 0;
  Matrix h2(1, 2);
  h2 << 0, 1;
  return FusionProblem(PartialEstimate{h1, Vector::Zero(1), SymMatrix::identity(1)},
                       PartialEstimate{h2, Vector::Zero(1), SymMatrix::identity(1)});
}

}  // namespace cifuse::testing
