#include "cifuse/known_cross.hpp"

#include <sstream>

namespace cifuse {

namespace {

// Checks (P*)^{-1} >= Hi^T Pi^{-1} Hi. Small violations are expected when the
// joint sits near the PSD boundary, so only gross ones are errors.
void check_within_intersection(const SymMatrix& info, const Matrix& h, const SymMatrix& p,
                               const char* name, double tol,
                               std::vector<std::string>& warnings) {
  const SymMatrix bound(h.transpose() * inverse_pd(p).mat() * h);
  const SymMatrix gap = info - bound;
  const double scale = std::max({1.0, eigensystem(info).max_abs(), eigensystem(bound).max_abs()});
  const double lo = eigenvalues(gap)(0) / scale;
  if (lo >= -tol) return;
  std::ostringstream os;
  os.precision(17);
  os << "fused information does not dominate " << name << " (relative margin " << lo << ")";
  if (lo >= -10.0 * tol) {
    warnings.push_back(os.str());
  } else {
    throw Error(ErrorCode::InternalInconsistency, os.str());
  }
}

}  // namespace

KnownCrossResult optimal_fusion_known_cross(const FusionProblem& problem,
                                            const JointCovariance& joint, double tol) {
  if (joint.P1().dim() != problem.p1() || joint.P2().dim() != problem.p2()) {
    throw Error(ErrorCode::DimensionMismatch, "joint covariance does not match the problem");
  }
  if (!joint.pd()) {
    throw Error(ErrorCode::SingularJoint, "joint covariance is not positive definite");
  }
  const Matrix h = problem.H();
  if (numerical_rank(h) != problem.n()) {
    throw Error(ErrorCode::RankDeficient, "stacked H lacks full column rank");
  }
  Eigen::LLT<Matrix> llt(joint.assembled().mat());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularJoint, "Cholesky factorization of the joint failed");
  }
  const Matrix pinv_h = llt.solve(h);  // Pjoint^{-1} H
  const SymMatrix info(h.transpose() * pinv_h);
  const SymMatrix p_star = inverse_pd(info);

  KnownCrossResult r{p_star.mat() * pinv_h.transpose(), p_star, {}};
  check_within_intersection(info, problem.est1().H, joint.P1(), "H1^T P1^-1 H1", tol, r.warnings);
  check_within_intersection(info, problem.est2().H, joint.P2(), "H2^T P2^-1 H2", tol, r.warnings);
  return r;
}

KnownCrossResult bar_shalom_campo(const JointCovariance& joint) {
  const Eigen::Index n = joint.P1().dim();
  if (joint.P2().dim() != n) {
    throw Error(ErrorCode::DimensionMismatch, "Bar-Shalom/Campo needs two full-state estimates");
  }
  if (!joint.pd()) {
    throw Error(ErrorCode::SingularJoint, "joint covariance is not positive definite");
  }
  const Matrix& p1 = joint.P1().mat();
  const Matrix& p12 = joint.P12();
  const SymMatrix delta(p1 + joint.P2().mat() - p12 - p12.transpose());
  Eigen::LLT<Matrix> llt(delta.mat());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularJoint, "P1 + P2 - P12 - P12^T is singular");
  }
  // (P1 - P12) Delta^{-1}, using the symmetry of Delta.
  const Matrix gain = llt.solve((p1 - p12).transpose()).transpose();
  Matrix k(n, 2 * n);
  k.leftCols(n) = Matrix::Identity(n, n) - gain;
  k.rightCols(n) = gain;
  const SymMatrix p_star(p1 - gain * (p1 - p12.transpose()));
  return KnownCrossResult{k, p_star, {}};
}

SymMatrix propagate(const Matrix& K, const JointCovariance& joint) {
  const SymMatrix j = joint.assembled();
  if (K.cols() != j.dim()) throw Error(ErrorCode::DimensionMismatch, "gain does not match joint");
  return SymMatrix(K * j.mat() * K.transpose());
}

}  // namespace cifuse
