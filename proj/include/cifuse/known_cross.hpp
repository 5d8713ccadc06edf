#pragma once

#include <string>
#include <vector>

#include "cifuse/problem.hpp"

namespace cifuse {

struct KnownCrossResult {
  Matrix K_star;      // n x (p1 + p2)
  SymMatrix P_star;   // n x n
  std::vector<std::string> warnings;

  Matrix K1(Eigen::Index p1) const { return K_star.leftCols(p1); }
  Matrix K2(Eigen::Index p2) const { return K_star.rightCols(p2); }
};

/// Gauss-Markov fusion with the full joint known:
/// P* = (H^T Pjoint^{-1} H)^{-1}, K* = P* H^T Pjoint^{-1}.
KnownCrossResult optimal_fusion_known_cross(const FusionProblem& problem,
                                            const JointCovariance& joint,
                                            double tol = kDefaultPsdTol);

/// Full-state special case H1 = H2 = I in Bar-Shalom/Campo form.
KnownCrossResult bar_shalom_campo(const JointCovariance& joint);

/// K Pjoint K^T for a stacked gain K = [K1 K2].
SymMatrix propagate(const Matrix& K, const JointCovariance& joint);

}  // namespace cifuse
