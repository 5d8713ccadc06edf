#include "cifuse/ellipsoid.hpp"

#include <cmath>
#include <sstream>

#include "cifuse/scalar.hpp"

namespace cifuse {

bool contains(const Ellipsoid& outer, const Ellipsoid& inner, double tol) {
  if (outer.dim() != inner.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "ellipsoids of different dimension");
  }
  return loewner_geq(inner.shape().base(), outer.shape().base(), tol);
}

const char* to_string(MembershipKind k) {
  switch (k) {
    case MembershipKind::Interior: return "Interior";
    case MembershipKind::Boundary: return "Boundary";
    case MembershipKind::Outside: return "Outside";
  }
  return "Unknown";
}

Membership membership(const Vector& x, const Ellipsoid& e, double tol) {
  if (x.size() != e.dim()) throw Error(ErrorCode::DimensionMismatch, "point and ellipsoid dims");
  const double v = x.dot(e.shape().mat() * x);
  if (v < 1.0 - tol) return {MembershipKind::Interior, v};
  if (v <= 1.0 + tol) return {MembershipKind::Boundary, v};
  return {MembershipKind::Outside, v};
}

std::optional<double> kahan_interpose(const Ellipsoid& sigma1, const Ellipsoid& sigma2,
                                      const Ellipsoid& target, int grid, double tol) {
  if (sigma1.dim() != sigma2.dim() || sigma1.dim() != target.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "interposition needs equal dims");
  }
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "grid must have at least 2 points");
  const SymMatrix& s1 = sigma1.shape().base();
  const SymMatrix& s2 = sigma2.shape().base();
  const SymMatrix& t = target.shape().base();
  auto combo = [&](double a) { return a * s1 + (1.0 - a) * s2; };

  for (int i = 0; i < grid; ++i) {
    const double a = static_cast<double>(i) / (grid - 1);
    if (loewner_geq(combo(a), t, tol)) return a;
  }
  // Exact witnesses can fall between grid points. lambda_min of an affine
  // matrix pencil is concave, so a golden-section search finds the best alpha.
  const auto best = golden_section_max(
      [&](double a) { return eigenvalues(combo(a) - t)(0); }, 0.0, 1.0, 1e-13, 200);
  if (loewner_geq(combo(best.x), t, tol)) return best.x;
  return std::nullopt;
}

double fused_membership_value(const Vector& x, const FusionProblem& problem,
                              const JointCovariance& joint) {
  const Matrix h = problem.H();
  Eigen::LLT<Matrix> llt(joint.assembled().mat());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularJoint, "joint covariance is not positive definite");
  }
  const Vector hx = h * x;
  return hx.dot(llt.solve(hx));
}

namespace {

// Householder reflector U (symmetric, orthogonal) with U * from = to; both unit.
Matrix householder_map(const Vector& from, const Vector& to) {
  const Eigen::Index m = from.size();
  const Vector v = from - to;
  const double vv = v.squaredNorm();
  if (vv <= 1e-30) return Matrix::Identity(m, m);
  return Matrix::Identity(m, m) - (2.0 / vv) * v * v.transpose();
}

Covering covering_ordered(const Vector& x, const FusionProblem& problem, double eps) {
  const auto& e1 = problem.est1();
  const auto& e2 = problem.est2();
  const Eigen::Index p1 = problem.p1();
  const Eigen::Index p2 = problem.p2();
  const SymMatrix r1 = sqrt_psd(pd_certify(e1.P_hat));
  const SymMatrix r2 = sqrt_psd(pd_certify(e2.P_hat));
  const Vector a = inv_sqrt_pd(pd_certify(e1.P_hat)).mat() * (e1.H * x);
  const Vector b = inv_sqrt_pd(pd_certify(e2.P_hat)).mat() * (e2.H * x);
  const double na = a.norm();
  const double nb = b.norm();

  Covering out{Matrix::Zero(p1, p2), 0.0, 0.0, eps, false, 0};
  if (na == 0.0 || nb == 0.0) {
    // lambda = 0: the independent joint already covers x.
    out.value = fused_membership_value(x, problem, JointCovariance(e1.P_hat, out.P12, e2.P_hat));
    return out;
  }

  Vector target = Vector::Zero(p2);
  target.head(p1) = a / na;
  const Matrix u1 = householder_map(b / nb, target).topRows(p1);
  const Matrix base = r1.mat() * u1 * r2.mat();
  const double lambda = std::min(na, nb) / std::max(na, nb);

  for (int step = 0; step <= 60; ++step) {
    const bool eps_branch = lambda > 1.0 - eps;
    const double c = eps_branch ? 1.0 - eps : lambda;
    const Matrix p12 = c * base;
    try {
      const JointCovariance joint(e1.P_hat, p12, e2.P_hat);
      if (joint.pd()) {
        const double v = fused_membership_value(x, problem, joint);
        if (v < 1.0) {
          return Covering{p12, v, c, eps, eps_branch, step};
        }
      }
    } catch (const NotPsdError&) {
      // rounding pushed the joint outside the cone; shrink and retry
    }
    if (!eps_branch && step > 0) break;
    eps *= 0.5;
  }
  throw Error(ErrorCode::InternalInconsistency,
              "covering cross-covariance construction failed to reach membership");
}

}  // namespace

Covering covering_cross_cov(const Vector& x, const FusionProblem& problem, double eps) {
  if (x.size() != problem.n()) throw Error(ErrorCode::DimensionMismatch, "x must have length n");
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorCode::OutOfRange, "eps must lie in (0, 1]");
  const double q1 = x.dot(problem.sigma1().mat() * x);
  const double q2 = x.dot(problem.sigma0().mat() * x);
  if (std::max(q1, q2) > 1.0 - kInteriorMargin) {
    std::ostringstream os;
    os.precision(17);
    os << "point is not strictly inside both prior ellipsoids (values " << q1 << ", " << q2
       << ")";
    throw Error(ErrorCode::NotInterior, os.str());
  }
  if (problem.p1() <= problem.p2()) return covering_ordered(x, problem, eps);
  Covering c = covering_ordered(x, problem.swapped(), eps);
  c.P12.transposeInPlace();
  return c;
}

}  // namespace cifuse
