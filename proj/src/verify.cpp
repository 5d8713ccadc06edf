#include "cifuse/verify.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "cifuse/random.hpp"
#include "cifuse/scalar.hpp"

namespace cifuse {

const char* to_string(CertMethod m) {
  switch (m) {
    case CertMethod::Lmi: return "lmi";
    case CertMethod::Tau: return "tau";
    case CertMethod::Petersen: return "petersen";
    case CertMethod::Adversarial: return "adversarial";
    case CertMethod::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

const char* to_string(UniquenessVerdict v) {
  switch (v) {
    case UniquenessVerdict::Unique: return "unique";
    case UniquenessVerdict::NotUnique: return "not_unique";
    case UniquenessVerdict::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

QPair q_pair(const FusionResult& result, const FusionProblem& problem) {
  if (result.K1.cols() != problem.p1() || result.K2.cols() != problem.p2() ||
      result.K1.rows() != problem.n() || result.K2.rows() != problem.n()) {
    throw Error(ErrorCode::DimensionMismatch, "gains do not match the problem");
  }
  const SymMatrix r1 = sqrt_psd(pd_certify(problem.est1().P_hat));
  const SymMatrix r2 = sqrt_psd(pd_certify(problem.est2().P_hat));
  return QPair{result.K1 * r1.mat(), result.K2 * r2.mat()};
}

double violation_tolerance(const FusionResult& result) {
  return kViolationTol * std::max(1.0, result.P_hat.mat().diagonal().maxCoeff());
}

namespace {

struct LmiBlocks {
  Matrix S;   // [Q1 Q2]
  Eigen::Index p1;
  Eigen::Index p2;
};

LmiBlocks lmi_blocks(const FusionResult& result, const FusionProblem& problem) {
  const QPair q = q_pair(result, problem);
  Matrix s(problem.n(), problem.p1() + problem.p2());
  s.leftCols(problem.p1()) = q.Q1;
  s.rightCols(problem.p2()) = q.Q2;
  return LmiBlocks{s, problem.p1(), problem.p2()};
}

SymMatrix lmi_r(const LmiBlocks& b, double alpha) {
  Vector d(b.p1 + b.p2);
  d.head(b.p1).setConstant(alpha);
  d.tail(b.p2).setConstant(1.0 - alpha);
  return SymMatrix::diagonal(d);
}

struct EigSummary {
  double min;
  double scale;
};

EigSummary lmi_spectrum(const SymMatrix& p_hat, const LmiBlocks& b, double alpha) {
  const SymMatrix t(assemble_block(p_hat.mat(), b.S, lmi_r(b, alpha).mat()));
  const Vector ev = eigenvalues(t);
  return {ev(0), std::max({1.0, std::abs(ev(0)), std::abs(ev(ev.size() - 1))})};
}

double lambda_max(const Matrix& m) {
  const Vector ev = eigenvalues(SymMatrix(m));
  return ev(ev.size() - 1);
}

bool is_zero(const Matrix& q, double scale) {
  return q.size() == 0 || q.norm() <= 1e-14 * scale;
}

}  // namespace

ConservativenessCertificate lmi_certificate(const FusionResult& result,
                                            const FusionProblem& problem, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::OutOfRange, "alpha outside [0, 1]");
  const LmiBlocks b = lmi_blocks(result, problem);
  // Cross-checks the spectral decision against the Schur-complement route.
  block_psd_report(result.P_hat, b.S, lmi_r(b, alpha));
  const EigSummary e = lmi_spectrum(result.P_hat, b, alpha);
  ConservativenessCertificate c{alpha, std::nullopt, e.min, e.scale, CertMethod::Lmi,
                                e.min >= -kLmiTol * e.scale};
  if (alpha > 0.0 && alpha < 1.0) c.tau = 1.0 / alpha - 1.0;
  return c;
}

ConservativenessCertificate tau_certificate(const FusionResult& result,
                                            const FusionProblem& problem, double alpha) {
  const QPair q = q_pair(result, problem);
  const Matrix& p = result.P_hat.mat();
  const double scale = std::max(1.0, result.P_hat.scale());
  const Matrix q1q1 = q.Q1 * q.Q1.transpose();
  const Matrix q2q2 = q.Q2 * q.Q2.transpose();
  ConservativenessCertificate c{alpha, std::nullopt, 0.0, scale, CertMethod::Tau, false};
  Matrix bound;
  if (is_zero(q.Q1, scale)) {
    bound = q2q2;
  } else if (is_zero(q.Q2, scale)) {
    bound = q1q1;
  } else if (alpha > 0.0 && alpha < 1.0) {
    bound = q1q1 / alpha + q2q2 / (1.0 - alpha);
    c.tau = 1.0 / alpha - 1.0;
  } else {
    c.lmi_min_eig = -std::numeric_limits<double>::infinity();
    return c;
  }
  const Vector ev = eigenvalues(SymMatrix(p - bound));
  c.lmi_min_eig = ev(0);
  c.scale = std::max({scale, std::abs(ev(0)), std::abs(ev(ev.size() - 1))});
  c.passed = ev(0) >= -kLmiTol * c.scale;
  return c;
}

LmiFeasibility lmi_feasibility(const FusionResult& result, const FusionProblem& problem,
                               int grid) {
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "grid must have at least 2 points");
  const LmiBlocks b = lmi_blocks(result, problem);
  double best_a = 0.0;
  EigSummary best{-std::numeric_limits<double>::infinity(), 1.0};
  for (int i = 0; i < grid; ++i) {
    const double a = static_cast<double>(i) / (grid - 1);
    const EigSummary e = lmi_spectrum(result.P_hat, b, a);
    if (e.min > best.min) {
      best = e;
      best_a = a;
    }
  }
  // The smallest eigenvalue of an affine pencil is concave in alpha.
  const double step = 1.0 / (grid - 1);
  const ScalarOpt refined = golden_section_max(
      [&](double a) { return lmi_spectrum(result.P_hat, b, a).min; },
      std::max(0.0, best_a - step), std::min(1.0, best_a + step), 1e-14, 200);
  if (refined.fx > best.min) {
    best = lmi_spectrum(result.P_hat, b, refined.x);
    best_a = refined.x;
  }
  return LmiFeasibility{best_a, best.min, best.scale, best.min >= -kLmiTol * best.scale};
}

UniquenessReport alpha_uniqueness_check(const FusionResult& result, const FusionProblem& problem,
                                        int grid) {
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "grid must have at least 2 points");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  UniquenessReport rep{UniquenessVerdict::NotApplicable, 0, nan, nan, nan, false};
  if (loewner_compare(problem.sigma0(), problem.sigma1()) == LoewnerRelation::Equal) return rep;

  const LmiBlocks b = lmi_blocks(result, problem);
  const double step = 1.0 / (grid - 1);
  double best = -std::numeric_limits<double>::infinity();
  bool stray = false;
  for (int i = 0; i < grid; ++i) {
    const double a = static_cast<double>(i) * step;
    const EigSummary e = lmi_spectrum(result.P_hat, b, a);
    if (e.min > best) {
      best = e.min;
      rep.argmax_alpha = a;
    }
    if (e.min >= -kLmiTol * e.scale) {
      if (rep.feasible_points == 0) rep.feasible_lo = a;
      rep.feasible_hi = a;
      ++rep.feasible_points;
      if (std::abs(a - result.alpha) > step * (1.0 + 1e-9)) stray = true;
    }
  }
  const EigSummary own = lmi_spectrum(result.P_hat, b, result.alpha);
  rep.family_alpha_feasible = own.min >= -kLmiTol * own.scale;
  const bool peak_near = std::abs(rep.argmax_alpha - result.alpha) <= step * (1.0 + 1e-9);
  rep.verdict = (!stray && rep.family_alpha_feasible && peak_near) ? UniquenessVerdict::Unique
                                                                   : UniquenessVerdict::NotUnique;
  return rep;
}

namespace {

constexpr int kChunk = 64;

Matrix bilinear(const QPair& q, const Matrix& x, const Matrix& p_hat) {
  const Matrix cross = q.Q1 * x * q.Q2.transpose();
  return q.Q1 * q.Q1.transpose() + cross + cross.transpose() + q.Q2 * q.Q2.transpose() - p_hat;
}

// Given the top eigenvector v of the current bilinear form, the X maximizing
// v^T G(X) v over the unit spectral ball is the aligned rank-one matrix.
Matrix align(const QPair& q, const Matrix& x, const Matrix& p_hat, double& value) {
  const Spectrum s = eigensystem(SymMatrix(bilinear(q, x, p_hat)));
  value = s.max();
  const Vector v = s.vectors.col(s.vectors.cols() - 1);
  const Vector a = q.Q1.transpose() * v;
  const Vector c = q.Q2.transpose() * v;
  if (a.norm() == 0.0 || c.norm() == 0.0) return x;
  return (a / a.norm()) * (c / c.norm()).transpose();
}

}  // namespace

double adversarial_x_search(const FusionResult& result, const FusionProblem& problem, int samples,
                            std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  const QPair q = q_pair(result, problem);
  const Matrix& p = result.P_hat.mat();
  const Eigen::Index p1 = problem.p1();
  const Eigen::Index p2 = problem.p2();

  std::vector<Matrix> seeds;
  seeds.push_back(Matrix::Zero(p1, p2));
  Eigen::JacobiSVD<Matrix> svd(q.Q1.transpose() * q.Q2, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix uv = svd.matrixU() * svd.matrixV().transpose();
  seeds.push_back(uv);
  seeds.push_back(-uv);

  double worst = -std::numeric_limits<double>::infinity();
  Matrix worst_x = seeds.front();
  auto consider = [&](const Matrix& x) {
    const double v = lambda_max(bilinear(q, x, p));
    if (v > worst) {
      worst = v;
      worst_x = x;
    }
  };
  for (const Matrix& x : seeds) consider(x);
  for (int chunk = 0; chunk * kChunk < samples; ++chunk) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(chunk));
    const int end = std::min(samples, (chunk + 1) * kChunk);
    for (int i = chunk * kChunk; i < end; ++i) {
      consider(random_contraction(rng, p1, p2, uniform01(rng)));
    }
  }
  // Alternating refinement from the deterministic extremes and the best sample.
  seeds.push_back(worst_x);
  for (const Matrix& start : seeds) {
    Matrix x = start;
    for (int it = 0; it < 50; ++it) {
      double before = 0.0;
      const Matrix next = align(q, x, p, before);
      if (before > worst) {
        worst = before;
        worst_x = x;
      }
      if ((next - x).norm() <= 1e-14) break;
      x = next;
    }
    consider(x);
  }
  return worst;
}

PetersenResult petersen_certificate(const FusionResult& result, const FusionProblem& problem,
                                    double tol) {
  const QPair q = q_pair(result, problem);
  const double scale = std::max(1.0, result.P_hat.scale());
  if (is_zero(q.Q1, scale) || is_zero(q.Q2, scale)) {
    throw Error(ErrorCode::DegenerateQ, "Petersen certificate needs Q1 != 0 and Q2 != 0");
  }
  const Matrix m = q.Q1 * q.Q1.transpose();
  const Matrix nn = q.Q2 * q.Q2.transpose();
  const Matrix g = m + nn - result.P_hat.mat();
  auto h = [&](double eps) { return lambda_max(g + eps * m + nn / eps); };
  // lambda_max(G + e^t M + e^-t N) is convex in t.
  const ScalarOpt best = golden_section_min([&](double t) { return h(std::exp(t)); },
                                            std::log(1e-8), std::log(1e8), 1e-12, 200);
  PetersenResult r{false, std::exp(best.x), best.fx, std::nullopt,
                   std::numeric_limits<double>::quiet_NaN(), false};
  const double limit = tol * std::max(1.0, result.P_hat.mat().diagonal().maxCoeff());
  r.feasible = best.fx <= limit;
  if (result.alpha > 0.0 && result.alpha < 1.0) {
    r.tau = 1.0 / result.alpha - 1.0;
    r.tau_value = h(*r.tau);
    r.tau_feasible = r.tau_value <= limit;
  }
  return r;
}

double joint_violation(const FusionResult& result, const JointCovariance& joint) {
  Matrix k(result.K1.rows(), result.K1.cols() + result.K2.cols());
  k << result.K1, result.K2;
  const Matrix kpk = k * joint.assembled().mat() * k.transpose();
  return lambda_max(kpk - result.P_hat.mat());
}

double monte_carlo_joint(const FusionResult& result, const FusionProblem& problem, int samples,
                         std::uint64_t seed, JointSampling mode) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  const Eigen::Index p1 = problem.p1();
  const Eigen::Index p2 = problem.p2();
  const SymMatrix r1 = sqrt_psd(pd_certify(problem.est1().P_hat));
  const SymMatrix r2 = sqrt_psd(pd_certify(problem.est2().P_hat));
  const QPair q = q_pair(result, problem);
  Matrix k(problem.n(), p1 + p2);
  k << result.K1, result.K2;

  // K Pjoint K^T with Pi = Ri (I - Di) Ri and P12 = P1^{1/2} X P2^{1/2}.
  auto violation = [&](const Matrix& d1, const Matrix& d2, const Matrix& x) {
    const SymMatrix a1(r1.mat() * (Matrix::Identity(p1, p1) - d1) * r1.mat());
    const SymMatrix a2(r2.mat() * (Matrix::Identity(p2, p2) - d2) * r2.mat());
    const Matrix p12 = sqrt_psd(psd_certify(a1)).mat() * x * sqrt_psd(psd_certify(a2)).mat();
    const Matrix joint = assemble_block(a1.mat(), p12, a2.mat());
    return lambda_max(k * joint * k.transpose() - result.P_hat.mat());
  };
  auto shrink = [&](Rng& rng, Eigen::Index p) -> Matrix {
    if (mode == JointSampling::HatDiagonal) return Matrix::Zero(p, p);
    const Matrix o = random_orthogonal(rng, p);
    Vector d(p);
    for (Eigen::Index i = 0; i < p; ++i) d(i) = 0.9 * uniform01(rng);
    return o * d.asDiagonal() * o.transpose();
  };

  // Deterministic extremes first: unshrunk blocks with X = 0 and the aligned
  // near-unit contractions.
  const Matrix z1 = Matrix::Zero(p1, p1);
  const Matrix z2 = Matrix::Zero(p2, p2);
  Eigen::JacobiSVD<Matrix> svd(q.Q1.transpose() * q.Q2, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix uv = (1.0 - 1e-12) * svd.matrixU() * svd.matrixV().transpose();
  double worst = violation(z1, z2, Matrix::Zero(p1, p2));
  worst = std::max(worst, violation(z1, z2, uv));
  worst = std::max(worst, violation(z1, z2, -uv));

  for (int chunk = 0; chunk * kChunk < samples; ++chunk) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(chunk));
    const int end = std::min(samples, (chunk + 1) * kChunk);
    for (int i = chunk * kChunk; i < end; ++i) {
      const Matrix d1 = shrink(rng, p1);
      const Matrix d2 = shrink(rng, p2);
      const double sigma = std::pow(uniform01(rng), 0.25) * (1.0 - 1e-12);
      const Matrix x = random_contraction(rng, p1, p2, sigma);
      worst = std::max(worst, violation(d1, d2, x));
    }
  }
  return worst;
}

}  // namespace cifuse
