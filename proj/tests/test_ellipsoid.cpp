#include <gtest/gtest.h>

#include <algorithm>

#include "cifuse/ellipsoid.hpp"
#include "support.hpp"

using namespace cifuse;
using cifuse::testing::max_abs;

namespace {

Vector random_unit(Rng& rng, Eigen::Index n) {
  for (;;) {
    const Vector v = gaussian_matrix(rng, n, 1).col(0);
    if (v.norm() > 1e-6) return v.normalized();
  }
}

// Point with max(x^T S1 x, x^T S0 x) = r^2.
Vector scaled_point(Rng& rng, const FusionProblem& problem, double r) {
  const Vector d = random_unit(rng, problem.n());
  const double q = std::max(d.dot(problem.sigma1().mat() * d), d.dot(problem.sigma0().mat() * d));
  return d * (r / std::sqrt(q));
}

}  // namespace

TEST(Ellipsoid, ContainmentIsReverseLoewner) {
  Vector small(2), big(2);
  small << 4.0, 4.0;
  big << 1.0, 1.0;
  const Ellipsoid inner(SymMatrix::diagonal(small));
  const Ellipsoid outer(SymMatrix::diagonal(big));
  EXPECT_TRUE(contains(outer, inner));
  EXPECT_FALSE(contains(inner, outer));
  EXPECT_TRUE(contains(outer, outer));
}

TEST(Ellipsoid, SingularShapeIsUnbounded) {
  Vector d(2);
  d << 1.0, 0.0;
  const Ellipsoid slab(SymMatrix::diagonal(d));
  Vector far(2);
  far << 0.5, 1e6;
  EXPECT_EQ(membership(far, slab).kind, MembershipKind::Interior);
  EXPECT_TRUE(contains(slab, Ellipsoid(SymMatrix::identity(2))));
  EXPECT_FALSE(contains(Ellipsoid(SymMatrix::identity(2)), slab));
}

TEST(Ellipsoid, MembershipKinds) {
  const Ellipsoid unit(SymMatrix::identity(2));
  Vector x(2);
  x << 0.6, 0.0;
  EXPECT_EQ(membership(x, unit).kind, MembershipKind::Interior);
  x << 0.6, 0.8;
  EXPECT_EQ(membership(x, unit).kind, MembershipKind::Boundary);
  x << 1.0, 0.1;
  EXPECT_EQ(membership(x, unit).kind, MembershipKind::Outside);
  EXPECT_NEAR(membership(x, unit).value, 1.01, 1e-15);
}

TEST(Ellipsoid, RejectsIndefiniteShape) {
  Vector d(2);
  d << 1.0, -0.5;
  EXPECT_THROW(Ellipsoid(SymMatrix::diagonal(d)), NotPsdError);
}

TEST(Ellipsoid, ContainmentAgreesWithBoundarySampling) {
  Rng rng = make_stream(201, 0);
  int agree = 0;
  const int pairs = 200;
  for (int k = 0; k < pairs; ++k) {
    const Eigen::Index n = 1 + k % 4;
    const SymMatrix a = random_spd(rng, n, 0.2, 5.0);
    // Half the time B = A + PSD, so containment holds.
    const SymMatrix b = (k % 2 == 0) ? a + random_spd(rng, n, 0.01, 1.0) : random_spd(rng, n, 0.2, 5.0);
    const bool claim = contains(Ellipsoid(a), Ellipsoid(b));
    // Boundary points of E(B) must lie in E(A) when E(B) is inside E(A).
    const SymMatrix bis = inv_sqrt_pd(pd_certify(b));
    double worst = 0.0;
    for (int s = 0; s < 2000; ++s) {
      const Vector x = bis.mat() * random_unit(rng, n);
      worst = std::max(worst, x.dot(a.mat() * x));
    }
    const bool sampled = worst <= 1.0 + 1e-9;
    if (claim) {
      EXPECT_TRUE(sampled) << "claimed containment violated, worst " << worst;
    }
    if (claim == sampled) ++agree;
  }
  // Sampling can miss a thin violating cap, so only demand broad agreement.
  EXPECT_GE(agree, pairs * 9 / 10);
}

TEST(KahanInterpose, FindsWitness) {
  const FusionProblem problem = cifuse::testing::two_sensor_problem();
  const Ellipsoid s1(problem.sigma1());
  const Ellipsoid s0(problem.sigma0());
  // Sigma_0.3 itself is a target; the smallest qualifying alpha is 0.3.
  const SymMatrix t = 0.3 * problem.sigma1() + 0.7 * problem.sigma0();
  const auto a = kahan_interpose(s1, s0, Ellipsoid(t));
  ASSERT_TRUE(a.has_value());
  EXPECT_NEAR(*a, 0.3, 1e-4);
}

TEST(KahanInterpose, NoWitnessForTooSmallEllipsoid) {
  const FusionProblem problem = cifuse::testing::two_sensor_problem();
  const SymMatrix t = 2.0 * (0.5 * problem.sigma1() + 0.5 * problem.sigma0());
  EXPECT_FALSE(kahan_interpose(Ellipsoid(problem.sigma1()), Ellipsoid(problem.sigma0()),
                               Ellipsoid(t))
                   .has_value());
}

TEST(Covering, InteriorPointsAreCovered) {
  Rng rng = make_stream(202, 0);
  int covered = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const FusionProblem problem = cifuse::testing::random_problem(rng);
    for (int s = 0; s < 20; ++s) {
      const double r = 0.999 * std::sqrt(uniform01(rng));
      const Vector x = scaled_point(rng, problem, r);
      const Covering c = covering_cross_cov(x, problem);
      const JointCovariance joint(problem.est1().P_hat, c.P12, problem.est2().P_hat);
      ASSERT_TRUE(joint.pd());
      const double v = fused_membership_value(x, problem, joint);
      EXPECT_LT(v, 1.0);
      EXPECT_NEAR(v, c.value, 1e-9 * std::max(1.0, v));
      if (v < 1.0) ++covered;
    }
  }
  EXPECT_EQ(covered, 2000);
}

TEST(Covering, EqualFormUsesEpsBranch) {
  // q1 == q2 gives lambda = 1, which needs the (1 - eps) construction.
  const FusionProblem problem(
      PartialEstimate{Matrix::Identity(2, 2), Vector::Zero(2), SymMatrix::identity(2)},
      PartialEstimate{Matrix::Identity(2, 2), Vector::Zero(2), SymMatrix::identity(2)});
  Vector x(2);
  x << 0.5, 0.5;
  const Covering c = covering_cross_cov(x, problem);
  EXPECT_TRUE(c.eps_branch);
  EXPECT_LT(c.value, 1.0);
  EXPECT_NEAR(c.lambda, 1.0 - c.eps, 1e-15);
}

TEST(Covering, SplitPointNearCorner) {
  const FusionProblem problem = cifuse::testing::split_problem();
  Vector x(2);
  x << 0.99, 0.99;
  const Covering c = covering_cross_cov(x, problem);
  // The corner value 2/(1+p) < 1 needs p > 1 - small; the construction gets there.
  EXPECT_LT(c.value, 1.0);
  EXPECT_GT(c.P12(0, 0), 0.9);
}

TEST(Covering, ZeroComponentNeedsNoCorrelation) {
  const FusionProblem problem = cifuse::testing::split_problem();
  Vector x(2);
  x << 0.5, 0.0;
  const Covering c = covering_cross_cov(x, problem);
  EXPECT_EQ(c.lambda, 0.0);
  EXPECT_LE(max_abs(c.P12), 0.0);
  EXPECT_NEAR(c.value, 0.25, 1e-15);
}

TEST(Covering, RejectsNonInteriorPoints) {
  const FusionProblem problem = cifuse::testing::split_problem();
  Vector x(2);
  x << 1.0, 0.2;
  try {
    covering_cross_cov(x, problem);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInterior);
  }
  x << 0.2, 0.2;
  EXPECT_THROW(covering_cross_cov(x, problem, 0.0), Error);
  EXPECT_THROW(covering_cross_cov(Vector::Zero(3), problem), Error);
}

TEST(Covering, OutsidePointsAreNeverCovered) {
  // For any admissible joint the fused value dominates both prior values.
  Rng rng = make_stream(203, 0);
  for (int inst = 0; inst < 50; ++inst) {
    const FusionProblem problem = cifuse::testing::random_problem(rng);
    for (int s = 0; s < 10; ++s) {
      const Vector x = scaled_point(rng, problem, 1.0 + uniform01(rng));
      const double q = std::max(x.dot(problem.sigma1().mat() * x), x.dot(problem.sigma0().mat() * x));
      for (int j = 0; j < 10; ++j) {
        const Matrix xf = random_contraction(rng, problem.p1(), problem.p2(), 0.999 * uniform01(rng));
        const Matrix p12 = cross_from_factor(problem.est1().P_hat, xf, problem.est2().P_hat);
        const JointCovariance joint(problem.est1().P_hat, p12, problem.est2().P_hat);
        EXPECT_GE(fused_membership_value(x, problem, joint), q * (1.0 - 1e-9));
      }
    }
  }
}

TEST(Ellipsoid, SplitCornerIsOutsideFusedEllipsoid) {
  const FusionProblem problem = cifuse::testing::split_problem();
  Vector x(2);
  x << 1.0, 1.0;
  for (double p : {-0.5, 0.0, 0.5, 0.9}) {
    const JointCovariance joint(SymMatrix::identity(1), Matrix::Constant(1, 1, p), SymMatrix::identity(1));
    const Ellipsoid fused(inverse_pd(SymMatrix(
        (problem.H().transpose() * inverse_pd(joint.assembled()).mat() * problem.H()).inverse())));
    const Membership m = membership(x, fused);
    EXPECT_EQ(m.kind, MembershipKind::Outside);
    EXPECT_NEAR(m.value, 2.0 / (1.0 + p), 1e-12);
  }
  EXPECT_EQ(membership(Vector::Zero(2), Ellipsoid(SymMatrix::identity(2))).value, 0.0);
}

TEST(KahanInterpose, EqualShapesGiveZero) {
  const Ellipsoid e(SymMatrix::identity(2));
  const auto a = kahan_interpose(e, e, e);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(*a, 0.0);
}

TEST(KahanInterpose, MidpointOfSwappedDiagonals) {
  Vector d1(2), d2(2);
  d1 << 1.0, 4.0;
  d2 << 4.0, 1.0;
  const SymMatrix s1 = SymMatrix::diagonal(d1);
  const SymMatrix s2 = SymMatrix::diagonal(d2);
  const auto a = kahan_interpose(Ellipsoid(s1), Ellipsoid(s2), Ellipsoid(0.5 * (s1 + s2)));
  ASSERT_TRUE(a.has_value());
  EXPECT_NEAR(*a, 0.5, 1e-12);
}

TEST(Covering, SplitInteriorPoint) {
  const FusionProblem problem = cifuse::testing::split_problem();
  Vector x(2);
  x << 0.5, 0.9;
  const Covering c = covering_cross_cov(x, problem);
  EXPECT_GT(c.P12(0, 0), -1.0);
  EXPECT_LT(c.P12(0, 0), 1.0);
  EXPECT_LT(c.value, 1.0);
  const JointCovariance joint(SymMatrix::identity(1), c.P12, SymMatrix::identity(1));
  EXPECT_NEAR(fused_membership_value(x, problem, joint), c.value, 1e-12);
}

TEST(Covering, OriginNeedsNoCorrelation) {
  const FusionProblem problem = cifuse::testing::two_sensor_problem();
  const Covering c = covering_cross_cov(Vector::Zero(2), problem);
  EXPECT_EQ(c.lambda, 0.0);
  EXPECT_EQ(c.value, 0.0);
}

TEST(Covering, EqualFormsOnSymmetricSeededInstance) {
  Rng rng = make_stream(204, 0);
  for (int inst = 0; inst < 20; ++inst) {
    const SymMatrix p = random_spd(rng, 3, 0.2, 5.0);
    const FusionProblem problem(PartialEstimate{Matrix::Identity(3, 3), Vector::Zero(3), p},
                                PartialEstimate{Matrix::Identity(3, 3), Vector::Zero(3), p});
    // Scale a random direction so both quadratic forms equal 0.5.
    const Vector d = random_unit(rng, 3);
    const Vector x = d * std::sqrt(0.5 / d.dot(problem.sigma1().mat() * d));
    const Covering c = covering_cross_cov(x, problem);
    EXPECT_TRUE(c.eps_branch);
    EXPECT_LE(c.shrink_steps, 20);
    EXPECT_LT(c.value, 1.0);
  }
}
