#pragma once

#include "cifuse/linalg.hpp"

namespace cifuse {

/// One node's view: an unbiased estimate of H x with covariance bound P_hat.
struct PartialEstimate {
  Matrix H;        // p x n
  Vector x_hat;    // p
  SymMatrix P_hat; // p x p, PD
};

/// Two partial estimates of the same n-dimensional state. Construction checks
/// the rank conditions rank(H1) = p1, rank(H2) = p2, rank([H1; H2]) = n and
/// that both covariance bounds are PD.
class FusionProblem {
 public:
  FusionProblem(PartialEstimate est1, PartialEstimate est2);

  const PartialEstimate& est1() const noexcept { return e1_; }
  const PartialEstimate& est2() const noexcept { return e2_; }
  Eigen::Index n() const noexcept { return e1_.H.cols(); }
  Eigen::Index p1() const noexcept { return e1_.H.rows(); }
  Eigen::Index p2() const noexcept { return e2_.H.rows(); }

  /// [H1; H2]
  Matrix H() const;

  const SymMatrix& P1_inv() const noexcept { return p1_inv_; }
  const SymMatrix& P2_inv() const noexcept { return p2_inv_; }
  /// H1^T P1^{-1} H1
  const SymMatrix& sigma1() const noexcept { return sigma1_; }
  /// H2^T P2^{-1} H2
  const SymMatrix& sigma0() const noexcept { return sigma0_; }

  /// Same problem with the two estimates exchanged.
  FusionProblem swapped() const;

 private:
  PartialEstimate e1_;
  PartialEstimate e2_;
  SymMatrix p1_inv_;
  SymMatrix p2_inv_;
  SymMatrix sigma1_;
  SymMatrix sigma0_;
};

/// True joint error covariance [P1 P12; P12^T P2], certified PSD on
/// construction.
class JointCovariance {
 public:
  JointCovariance(const SymMatrix& p1, const Matrix& p12, const SymMatrix& p2,
                  double tol = kDefaultPsdTol);

  const SymMatrix& P1() const noexcept { return p1_; }
  const SymMatrix& P2() const noexcept { return p2_; }
  const Matrix& P12() const noexcept { return p12_; }
  bool pd() const noexcept { return pd_; }
  double min_eig() const noexcept { return min_eig_; }
  SymMatrix assembled() const;

  JointCovariance swapped() const;

 private:
  SymMatrix p1_;
  SymMatrix p2_;
  Matrix p12_;
  bool pd_;
  double min_eig_;
};

/// X = P1^{-1/2} P12 P2^{-1/2}.
Matrix cross_factor(const JointCovariance& joint);

}  // namespace cifuse
