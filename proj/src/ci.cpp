#include "cifuse/ci.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cifuse/ellipsoid.hpp"
#include "cifuse/scalar.hpp"
#include "cifuse/verify.hpp"

namespace cifuse {

const char* to_string(CostKind c) {
  return c == CostKind::Det ? "det" : "trace";
}

CostKind cost_from_string(const std::string& s) {
  if (s == "det") return CostKind::Det;
  if (s == "trace") return CostKind::Trace;
  throw Error(ErrorCode::InvalidArgument, "unknown cost '" + s + "' (expected det or trace)");
}

bool operator<(const ExtendedValue& a, const ExtendedValue& b) {
  if (a.infinite) return false;
  if (b.infinite) return true;
  return a.value < b.value;
}

bool operator<=(const ExtendedValue& a, const ExtendedValue& b) { return !(b < a); }

SigmaPair sigma_pair(const FusionProblem& problem) {
  return SigmaPair{problem.sigma1(), problem.sigma0(), problem.p1() == problem.n(),
                   problem.p2() == problem.n()};
}

SymMatrix sigma_alpha(const SigmaPair& pair, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha = " << alpha << " outside [0, 1]";
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  return alpha * pair.sigma1 + (1.0 - alpha) * pair.sigma0;
}

bool sigma_alpha_regular(const SigmaPair& pair, double alpha) {
  if (alpha == 0.0) return pair.sigma0_regular;
  if (alpha == 1.0) return pair.sigma1_regular;
  return true;
}

double cost_of(const SymMatrix& p, CostKind cost) {
  return cost == CostKind::Det ? determinant(p.mat()) : p.mat().trace();
}

ExtendedValue extended_cost(const SigmaPair& pair, CostKind cost, double alpha) {
  const SymMatrix s = sigma_alpha(pair, alpha);
  if (!sigma_alpha_regular(pair, alpha)) return ExtendedValue::infinity();
  if (cost == CostKind::Det) {
    const double d = determinant(s.mat());
    if (!(d > 0.0)) return ExtendedValue::infinity();
    return ExtendedValue::finite(1.0 / d);
  }
  Eigen::LLT<Matrix> llt(s.mat());
  if (llt.info() != Eigen::Success) return ExtendedValue::infinity();
  return ExtendedValue::finite(llt.solve(Matrix::Identity(s.dim(), s.dim())).trace());
}

double delta(const SigmaPair& pair, double alpha) {
  const SymMatrix adj = adjugate(sigma_alpha(pair, alpha));
  return (adj.mat() * (pair.sigma1 - pair.sigma0).mat()).trace();
}

Vector delta_polynomial(const SigmaPair& pair) {
  const Eigen::Index n = pair.sigma1.dim();
  if (n == 1) return Vector::Constant(1, delta(pair, 0.0));
  Matrix v(n, n);
  Vector f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) / static_cast<double>(n - 1);
    double power = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      v(i, k) = power;
      power *= a;
    }
    f(i) = delta(pair, a);
  }
  return v.colPivHouseholderQr().solve(f);
}

const char* to_string(Branch b) {
  switch (b) {
    case Branch::Given: return "given";
    case Branch::Degenerate: return "degenerate";
    case Branch::ForcedZero: return "forced_alpha0";
    case Branch::ForcedOne: return "forced_alpha1";
    case Branch::DeltaAtZero: return "delta0_nonpositive";
    case Branch::DeltaAtOne: return "delta1_nonnegative";
    case Branch::DeltaRoot: return "delta_root";
    case Branch::EndpointZero: return "endpoint_alpha0";
    case Branch::EndpointOne: return "endpoint_alpha1";
    case Branch::GoldenSection: return "golden_section";
  }
  return "unknown";
}

FusionResult ku_rule(const FusionProblem& problem, double alpha, CostKind cost) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidFamilyParameterError(alpha, "outside [0, 1]");
  }
  const SigmaPair pair = sigma_pair(problem);
  const LoewnerRelation rel = loewner_compare(pair.sigma0, pair.sigma1);
  if (rel == LoewnerRelation::StrictlyGreater && alpha != 0.0) {
    throw InvalidFamilyParameterError(alpha, "Sigma0 > Sigma1 forces alpha = 0");
  }
  if (rel == LoewnerRelation::StrictlyLess && alpha != 1.0) {
    throw InvalidFamilyParameterError(alpha, "Sigma0 < Sigma1 forces alpha = 1");
  }
  if (rel != LoewnerRelation::Equal && !sigma_alpha_regular(pair, alpha)) {
    std::ostringstream os;
    os.precision(17);
    os << "Sigma_alpha is singular at alpha = " << alpha;
    throw Error(ErrorCode::SingularSigma, os.str());
  }
  const SymMatrix p_hat = inverse_pd(sigma_alpha(pair, alpha));
  const auto& e1 = problem.est1();
  const auto& e2 = problem.est2();
  Matrix k1 = alpha * p_hat.mat() * e1.H.transpose() * problem.P1_inv().mat();
  Matrix k2 = (1.0 - alpha) * p_hat.mat() * e2.H.transpose() * problem.P2_inv().mat();
  Vector x = k1 * e1.x_hat + k2 * e2.x_hat;
  Diagnostics diag;
  diag.relation = rel;
  const double value = cost_of(p_hat, cost);
  return FusionResult{alpha, std::move(k1), std::move(k2), p_hat, std::move(x), cost, value, diag};
}

namespace {

FusionResult finish(const FusionProblem& problem, double alpha, CostKind cost, Diagnostics diag) {
  FusionResult r = ku_rule(problem, alpha, cost);
  diag.relation = r.diag.relation;
  r.diag = diag;
  return r;
}

}  // namespace

FusionResult solve_ci_det(const FusionProblem& problem) {
  const SigmaPair pair = sigma_pair(problem);
  Diagnostics diag;
  const LoewnerRelation rel = loewner_compare(pair.sigma0, pair.sigma1);
  if (rel == LoewnerRelation::Equal) {
    diag.branch = Branch::Degenerate;
    return finish(problem, 0.5, CostKind::Det, diag);
  }
  diag.delta0 = delta(pair, 0.0);
  diag.delta1 = delta(pair, 1.0);
  diag.has_delta = true;
  if (rel == LoewnerRelation::StrictlyGreater) {
    diag.branch = Branch::ForcedZero;
    return finish(problem, 0.0, CostKind::Det, diag);
  }
  if (rel == LoewnerRelation::StrictlyLess) {
    diag.branch = Branch::ForcedOne;
    return finish(problem, 1.0, CostKind::Det, diag);
  }
  // With a singular endpoint delta may vanish there (adj = 0 once the nullity
  // is >= 2) although the extended cost is infinite, so the endpoint branches
  // only apply where Sigma is regular.
  if (pair.sigma0_regular && diag.delta0 <= 0.0) {
    diag.branch = Branch::DeltaAtZero;
    return finish(problem, 0.0, CostKind::Det, diag);
  }
  if (pair.sigma1_regular && diag.delta1 >= 0.0) {
    diag.branch = Branch::DeltaAtOne;
    return finish(problem, 1.0, CostKind::Det, diag);
  }
  // d/dalpha det(Sigma_alpha^{-1}) = -delta / det(Sigma_alpha)^2, so a
  // positive delta means the minimum lies further right.
  double lo = 0.0;
  double hi = 1.0;
  int it = 0;
  while (hi - lo > 1e-12 && it < 200) {
    const double mid = 0.5 * (lo + hi);
    const double d = delta(pair, mid);
    ++it;
    if (d == 0.0) {
      lo = hi = mid;
      break;
    }
    if (d > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  diag.branch = Branch::DeltaRoot;
  diag.iterations = it;
  return finish(problem, 0.5 * (lo + hi), CostKind::Det, diag);
}

double trace_fixed_point_residual(const FusionResult& result, const FusionProblem& problem) {
  const double r1 = std::sqrt(
      std::max(0.0, (result.K1 * problem.est1().P_hat.mat() * result.K1.transpose()).trace()));
  const double r2 = std::sqrt(
      std::max(0.0, (result.K2 * problem.est2().P_hat.mat() * result.K2.transpose()).trace()));
  if (r1 + r2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(result.alpha - r1 / (r1 + r2));
}

FusionResult solve_ci_trace(const FusionProblem& problem) {
  const SigmaPair pair = sigma_pair(problem);
  Diagnostics diag;
  const LoewnerRelation rel = loewner_compare(pair.sigma0, pair.sigma1);
  auto done = [&](double alpha) {
    FusionResult r = finish(problem, alpha, CostKind::Trace, diag);
    r.diag.fixed_point_residual = trace_fixed_point_residual(r, problem);
    r.diag.has_fixed_point = true;
    return r;
  };
  if (rel == LoewnerRelation::Equal) {
    diag.branch = Branch::Degenerate;
    return done(0.5);
  }
  if (rel == LoewnerRelation::StrictlyGreater) {
    diag.branch = Branch::ForcedZero;
    return done(0.0);
  }
  if (rel == LoewnerRelation::StrictlyLess) {
    diag.branch = Branch::ForcedOne;
    return done(1.0);
  }

  const double inf = std::numeric_limits<double>::infinity();
  auto j = [&](double a) {
    const ExtendedValue v = extended_cost(pair, CostKind::Trace, a);
    return v.infinite ? inf : v.value;
  };
  // Trace of the inverse is convex along the pencil. Where an endpoint is
  // singular the cost blows up there, so shrink towards it until the cost
  // exceeds the midpoint value; the minimum then lies inside the bracket.
  const double jmid = j(0.5);
  double lo = 0.0;
  if (!pair.sigma0_regular) {
    lo = 0.25;
    for (int k = 0; k < 60 && !(j(lo) > jmid); ++k) lo *= 0.5;
  }
  double hi = 1.0;
  if (!pair.sigma1_regular) {
    double gap = 0.25;
    for (int k = 0; k < 60 && !(j(1.0 - gap) > jmid); ++k) gap *= 0.5;
    hi = 1.0 - gap;
  }
  ScalarOpt best = golden_section_min(j, lo, hi, 1e-12, 200);

  // Polish with the exact derivative -Trace(S^{-1} D S^{-1}), which is
  // increasing in alpha; golden section alone stalls at sqrt(eps) near a flat
  // minimum.
  const SymMatrix d = pair.sigma1 - pair.sigma0;
  auto dj = [&](double a) {
    const SymMatrix inv = inverse_pd(sigma_alpha(pair, a));
    return -(inv.mat() * d.mat() * inv.mat()).trace();
  };
  const double w = 1e-6;
  const double plo = std::max(lo, best.x - w);
  const double phi = std::min(hi, best.x + w);
  if (plo > 0.0 && phi < 1.0 && dj(plo) < 0.0 && dj(phi) > 0.0) {
    const ScalarOpt root = bisect_root(dj, plo, phi, 1e-15);
    if (j(root.x) <= best.fx) best = ScalarOpt{root.x, j(root.x), best.iterations + root.iterations};
  }
  diag.iterations = best.iterations;

  double alpha = best.x;
  diag.branch = Branch::GoldenSection;
  if (pair.sigma0_regular && j(0.0) <= j(alpha)) {
    alpha = 0.0;
    diag.branch = Branch::EndpointZero;
  }
  if (pair.sigma1_regular && j(1.0) < j(alpha)) {
    alpha = 1.0;
    diag.branch = Branch::EndpointOne;
  }
  return done(alpha);
}

FusionResult solve_ci(const FusionProblem& problem, CostKind cost) {
  FusionResult r = cost == CostKind::Det ? solve_ci_det(problem) : solve_ci_trace(problem);
  const ConservativenessCertificate cert = lmi_certificate(r, problem, r.alpha);
  r.diag.lmi_min_eig = cert.lmi_min_eig;
  r.diag.has_lmi = true;
  if (!cert.passed) {
    std::ostringstream os;
    os.precision(17);
    os << "LMI certificate failed on the CI solution (min eigenvalue " << cert.lmi_min_eig << ")";
    throw Error(ErrorCode::InternalInconsistency, os.str());
  }
  return r;
}

std::optional<double> lower_bound_witness(const FusionProblem& problem,
                                          const SymMatrix& candidate_P, int grid, double tol) {
  if (candidate_P.dim() != problem.n()) {
    throw Error(ErrorCode::DimensionMismatch, "candidate covariance must be n x n");
  }
  const SymMatrix target = inverse_pd(candidate_P);
  return kahan_interpose(Ellipsoid(problem.sigma1()), Ellipsoid(problem.sigma0()),
                         Ellipsoid(target), grid, tol);
}

}  // namespace cifuse
