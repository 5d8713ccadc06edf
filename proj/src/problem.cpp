#include "cifuse/problem.hpp"

#include <sstream>

namespace cifuse {

namespace {

void check_estimate(const PartialEstimate& e, const char* name) {
  const Eigen::Index p = e.H.rows();
  std::ostringstream os;
  if (p < 1 || e.H.cols() < 1) {
    os << name << ": H must be non-empty";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (e.x_hat.size() != p) {
    os << name << ": x_hat has length " << e.x_hat.size() << ", expected " << p;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (e.P_hat.dim() != p) {
    os << name << ": P_hat is " << e.P_hat.dim() << "x" << e.P_hat.dim() << ", expected " << p
       << "x" << p;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (!e.H.allFinite() || !e.x_hat.allFinite() || !e.P_hat.mat().allFinite()) {
    os << name << ": non-finite entries";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  if (numerical_rank(e.H) != p) {
    os << "assumption A1 violated: " << name << ".H (" << p << "x" << e.H.cols()
       << ") does not have full row rank";
    throw Error(ErrorCode::AssumptionViolated, os.str());
  }
  try {
    pd_certify(e.P_hat);
  } catch (const Error& err) {
    os << name << ".P_hat must be positive definite: " << err.what();
    throw Error(ErrorCode::NotPd, os.str());
  }
}

SymMatrix information(const Matrix& h, const SymMatrix& p_inv) {
  return SymMatrix(h.transpose() * p_inv.mat() * h);
}

}  // namespace

FusionProblem::FusionProblem(PartialEstimate est1, PartialEstimate est2)
    : e1_(std::move(est1)),
      e2_(std::move(est2)),
      p1_inv_(SymMatrix::identity(1)),
      p2_inv_(SymMatrix::identity(1)),
      sigma1_(SymMatrix::identity(1)),
      sigma0_(SymMatrix::identity(1)) {
  check_estimate(e1_, "est1");
  check_estimate(e2_, "est2");
  if (e1_.H.cols() != e2_.H.cols()) {
    std::ostringstream os;
    os << "est1.H has " << e1_.H.cols() << " columns but est2.H has " << e2_.H.cols();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (numerical_rank(H()) != n()) {
    std::ostringstream os;
    os << "assumption A1 violated: stacked [H1; H2] does not have rank n = " << n();
    throw Error(ErrorCode::AssumptionViolated, os.str());
  }
  p1_inv_ = inverse_pd(e1_.P_hat);
  p2_inv_ = inverse_pd(e2_.P_hat);
  sigma1_ = information(e1_.H, p1_inv_);
  sigma0_ = information(e2_.H, p2_inv_);
}

Matrix FusionProblem::H() const {
  Matrix h(p1() + p2(), n());
  h.topRows(p1()) = e1_.H;
  h.bottomRows(p2()) = e2_.H;
  return h;
}

FusionProblem FusionProblem::swapped() const { return FusionProblem(e2_, e1_); }

JointCovariance::JointCovariance(const SymMatrix& p1, const Matrix& p12, const SymMatrix& p2,
                                 double tol)
    : p1_(p1), p2_(p2), p12_(p12), pd_(false), min_eig_(0.0) {
  if (p12.rows() != p1.dim() || p12.cols() != p2.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "P12 must be p1 x p2");
  }
  const PsdMatrix cert = psd_certify(assembled(), tol);
  pd_ = cert.strict();
  min_eig_ = cert.min_eig();
}

SymMatrix JointCovariance::assembled() const {
  return SymMatrix(assemble_block(p1_.mat(), p12_, p2_.mat()));
}

JointCovariance JointCovariance::swapped() const {
  return JointCovariance(p2_, p12_.transpose(), p1_);
}

Matrix cross_factor(const JointCovariance& joint) {
  return cross_factor(joint.P1(), joint.P12(), joint.P2());
}

}  // namespace cifuse
