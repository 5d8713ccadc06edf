#pragma once

#include <optional>

#include "cifuse/problem.hpp"

namespace cifuse {

/// E(S) = {x | x^T S x <= 1}. S may be singular (unbounded ellipsoid).
class Ellipsoid {
 public:
  explicit Ellipsoid(const SymMatrix& shape, double tol = kDefaultPsdTol)
      : shape_(psd_certify(shape, tol)) {}

  const PsdMatrix& shape() const noexcept { return shape_; }
  Eigen::Index dim() const noexcept { return shape_.dim(); }

 private:
  PsdMatrix shape_;
};

/// E(inner.shape) subset of E(outer.shape), i.e. inner.shape >= outer.shape.
bool contains(const Ellipsoid& outer, const Ellipsoid& inner, double tol = kDefaultPsdTol);

enum class MembershipKind { Interior, Boundary, Outside };
const char* to_string(MembershipKind k);

struct Membership {
  MembershipKind kind;
  double value;  // x^T S x
};

inline constexpr double kMembershipTol = 1e-9;

Membership membership(const Vector& x, const Ellipsoid& e, double tol = kMembershipTol);

inline constexpr int kDefaultInterposeGrid = 10001;

/// Smallest grid alpha with alpha*S1 + (1-alpha)*S2 >= target. When no grid
/// point qualifies, the concave function alpha -> lambda_min(S_alpha - target)
/// is maximized and its maximizer is returned if it qualifies.
std::optional<double> kahan_interpose(const Ellipsoid& sigma1, const Ellipsoid& sigma2,
                                      const Ellipsoid& target, int grid = kDefaultInterposeGrid,
                                      double tol = kDefaultPsdTol);

/// Minimum interior margin for covering_cross_cov.
inline constexpr double kInteriorMargin = 1e-6;

struct Covering {
  Matrix P12;          // p1 x p2
  double value;        // x^T (P*(P12))^{-1} x
  double lambda;       // scale applied to P1^{1/2} U1 P2^{1/2}
  double eps;          // final eps (meaningful when eps_branch)
  bool eps_branch;     // the (1 - eps) construction was used
  int shrink_steps;
};

/// Cross-covariance P12 between the two priors (P1 = P_hat1, P2 = P_hat2) for
/// which the Gauss-Markov fused ellipsoid contains x. x must lie strictly
/// inside both prior ellipsoids.
Covering covering_cross_cov(const Vector& x, const FusionProblem& problem, double eps = 0.5);

/// x^T H^T Pjoint^{-1} H x, the membership value of x in E((P*)^{-1}).
double fused_membership_value(const Vector& x, const FusionProblem& problem,
                              const JointCovariance& joint);

}  // namespace cifuse
