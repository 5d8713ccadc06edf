#pragma once

#include <optional>
#include <string>

#include "cifuse/problem.hpp"

namespace cifuse {

enum class CostKind { Det, Trace };
const char* to_string(CostKind c);
/// "det" or "trace"; throws InvalidArgument otherwise.
CostKind cost_from_string(const std::string& s);

/// Cost of P = Sigma^{-1}, +infinity when Sigma is singular. Kept as a flag
/// rather than a large float so branch logic stays exact.
struct ExtendedValue {
  bool infinite = false;
  double value = 0.0;

  static ExtendedValue finite(double v) { return {false, v}; }
  static ExtendedValue infinity() { return {true, 0.0}; }
};

bool operator<(const ExtendedValue& a, const ExtendedValue& b);
bool operator<=(const ExtendedValue& a, const ExtendedValue& b);

struct SigmaPair {
  SymMatrix sigma1;  // H1^T P1^{-1} H1
  SymMatrix sigma0;  // H2^T P2^{-1} H2
  bool sigma1_regular;  // p1 == n
  bool sigma0_regular;  // p2 == n
};

SigmaPair sigma_pair(const FusionProblem& problem);

/// alpha * sigma1 + (1 - alpha) * sigma0.
SymMatrix sigma_alpha(const SigmaPair& pair, double alpha);

/// Sigma_alpha is nonsingular for every alpha in (0, 1); at the endpoints it is
/// nonsingular exactly when the corresponding H is square.
bool sigma_alpha_regular(const SigmaPair& pair, double alpha);

/// J((Sigma_alpha)^{-1}) with the extended value at singular endpoints.
ExtendedValue extended_cost(const SigmaPair& pair, CostKind cost, double alpha);

/// Trace(adj(Sigma_alpha) (Sigma1 - Sigma0)). Valid at singular arguments.
double delta(const SigmaPair& pair, double alpha);

/// Coefficients c_0..c_{n-1} of delta(alpha) = sum_k c_k alpha^k, recovered
/// by interpolation at n equispaced points.
Vector delta_polynomial(const SigmaPair& pair);

enum class Branch {
  Given,          // alpha supplied by the caller
  Degenerate,     // Sigma0 == Sigma1, any alpha optimal
  ForcedZero,     // Sigma0 > Sigma1
  ForcedOne,      // Sigma0 < Sigma1
  DeltaAtZero,    // delta(0) <= 0
  DeltaAtOne,     // delta(1) >= 0
  DeltaRoot,      // interior root of delta
  EndpointZero,   // trace cost, alpha = 0 beats the interior
  EndpointOne,
  GoldenSection,  // trace cost, interior minimum
};
const char* to_string(Branch b);

struct Diagnostics {
  Branch branch = Branch::Given;
  LoewnerRelation relation = LoewnerRelation::Incomparable;  // Sigma0 vs Sigma1
  double delta0 = 0.0;
  double delta1 = 0.0;
  bool has_delta = false;
  double fixed_point_residual = 0.0;
  bool has_fixed_point = false;
  double lmi_min_eig = 0.0;
  bool has_lmi = false;
  int iterations = 0;
};

struct FusionResult {
  double alpha;
  Matrix K1;  // n x p1
  Matrix K2;  // n x p2
  SymMatrix P_hat;
  Vector fused_x;
  CostKind cost;
  double cost_value;  // J(P_hat)
  Diagnostics diag;
};

double cost_of(const SymMatrix& p, CostKind cost);

/// Member of the Kahan-Uhlmann family for the given alpha. Rejects alpha
/// outside the family's case table.
FusionResult ku_rule(const FusionProblem& problem, double alpha, CostKind cost = CostKind::Det);

FusionResult solve_ci_det(const FusionProblem& problem);
FusionResult solve_ci_trace(const FusionProblem& problem);

/// Dispatches on the cost and asserts the LMI certificate on the result.
FusionResult solve_ci(const FusionProblem& problem, CostKind cost);

/// |alpha - r1 / (r1 + r2)| with r_i = sqrt(Trace(K_i P_i K_i^T)).
double trace_fixed_point_residual(const FusionResult& result, const FusionProblem& problem);

/// Some alpha with candidate_P >= (Sigma_alpha)^{-1}, or nullopt.
std::optional<double> lower_bound_witness(const FusionProblem& problem,
                                          const SymMatrix& candidate_P, int grid = 10001,
                                          double tol = kDefaultPsdTol);

}  // namespace cifuse
