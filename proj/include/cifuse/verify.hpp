#pragma once

#include <cstdint>
#include <optional>

#include "cifuse/ci.hpp"

namespace cifuse {

enum class CertMethod { Lmi, Tau, Petersen, Adversarial, MonteCarlo };
const char* to_string(CertMethod m);

struct ConservativenessCertificate {
  double alpha;
  std::optional<double> tau;  // 1/alpha - 1 for alpha in (0, 1)
  double lmi_min_eig;         // smallest eigenvalue of the tested matrix
  double scale;               // max(1, largest |eigenvalue|) of that matrix
  CertMethod method;
  bool passed;
};

/// Q1 = K1 P1^{1/2}, Q2 = K2 P2^{1/2}.
struct QPair {
  Matrix Q1;
  Matrix Q2;
};
QPair q_pair(const FusionResult& result, const FusionProblem& problem);

/// Relative tolerance on the smallest LMI eigenvalue.
inline constexpr double kLmiTol = 1e-9;
/// Absolute tolerance on sampled violations, before scaling.
inline constexpr double kViolationTol = 1e-8;

/// 1e-8 scaled by max(1, largest diagonal entry of P_hat).
double violation_tolerance(const FusionResult& result);

/// [P Q1 Q2; Q1^T aI 0; Q2^T 0 (1-a)I] >= 0.
ConservativenessCertificate lmi_certificate(const FusionResult& result,
                                            const FusionProblem& problem, double alpha);

/// The scalar form P >= Q1Q1^T / a + Q2Q2^T / (1-a), with the two degenerate
/// branches when Q1 or Q2 vanishes.
ConservativenessCertificate tau_certificate(const FusionResult& result,
                                            const FusionProblem& problem, double alpha);

/// Best alpha' for the LMI: maximizes its (concave) smallest eigenvalue.
struct LmiFeasibility {
  double alpha;
  double min_eig;
  double scale;
  bool feasible;
};
LmiFeasibility lmi_feasibility(const FusionResult& result, const FusionProblem& problem,
                               int grid = 1001);

enum class UniquenessVerdict { Unique, NotUnique, NotApplicable };
const char* to_string(UniquenessVerdict v);

struct UniquenessReport {
  UniquenessVerdict verdict;
  int feasible_points;    // grid points where the LMI holds
  double feasible_lo;     // smallest feasible grid alpha (NaN if none)
  double feasible_hi;
  double argmax_alpha;    // grid alpha with the largest smallest eigenvalue
  bool family_alpha_feasible;
};

/// Scans alpha' over a uniform grid and checks that the LMI only holds near
/// the family parameter of the result.
UniquenessReport alpha_uniqueness_check(const FusionResult& result, const FusionProblem& problem,
                                        int grid = 1001);

/// Worst lambda_max(Q1Q1^T + Q1XQ2^T + Q2X^TQ1^T + Q2Q2^T - P) over sampled
/// and aligned X with sigma_max(X) <= 1.
double adversarial_x_search(const FusionResult& result, const FusionProblem& problem, int samples,
                            std::uint64_t seed);

struct PetersenResult {
  bool feasible;
  double epsilon;         // minimizer of the log-space search
  double min_value;       // lambda_max at epsilon
  std::optional<double> tau;    // 1/alpha - 1
  double tau_value;       // lambda_max at epsilon = tau
  bool tau_feasible;
};

/// Searches eps > 0 with G + eps Q1Q1^T + Q2Q2^T / eps <= 0 where
/// G = Q1Q1^T + Q2Q2^T - P. Throws DegenerateQ when Q1 or Q2 is zero.
PetersenResult petersen_certificate(const FusionResult& result, const FusionProblem& problem,
                                    double tol = kViolationTol);

enum class JointSampling {
  HatDiagonal,  // P1 = P_hat1, P2 = P_hat2, only P12 varies
  FullShrink,   // diagonal blocks shrunk below the hats as well
};

/// Worst lambda_max(K Pjoint K^T - P_hat) over sampled admissible joints.
double monte_carlo_joint(const FusionResult& result, const FusionProblem& problem, int samples,
                         std::uint64_t seed, JointSampling mode = JointSampling::FullShrink);

/// lambda_max(K Pjoint K^T - P_hat) for one given joint.
double joint_violation(const FusionResult& result, const JointCovariance& joint);

}  // namespace cifuse
