// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cifuse/ci.hpp"
#include "cifuse/known_cross.hpp"
#include "cifuse/network.hpp"
#include "cifuse/verify.hpp"
#include "mutants.hpp"
#include "support.hpp"

using namespace cifuse;
using cifuse::testing::max_abs;

namespace {

// Criterion 1
constexpr double kDeltaCoeffTol = 1e-10;
constexpr double kDerivTol = 1e-6;
constexpr double kFdStep = 1e-6;
// Criterion 2
constexpr double kClosedFormTol = 1e-12;
// Criterion 3
constexpr double kLoewnerTol = 1e-9;
constexpr double kBscTol = 1e-10;
// Criterion 4
constexpr double kCostSlack = 1e-9;     // relative to max(1, grid minimum)
constexpr double kAlphaTol = 1e-3;
constexpr double kFixedPointTol = 1e-6;
constexpr int kGrid = 1001;
// Criterion 5
constexpr int kSamples = 1000;
constexpr int kMutantInstances = 20;
// Runtime budgets in seconds.
constexpr double kBudget[] = {1.0, 1.0, 30.0, 60.0, 300.0, 60.0, 30.0};

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome criterion1() {
  Outcome o;
  const FusionProblem problem = cifuse::testing::two_sensor_problem();
  const SigmaPair pair = sigma_pair(problem);
  const Vector c = delta_polynomial(pair);
  // Delta(alpha) = -3.6 alpha - 5.2: slope c(1), intercept c(0).
  if (c.size() != 2 || std::abs(c(1) + 3.6) > kDeltaCoeffTol || std::abs(c(0) + 5.2) > kDeltaCoeffTol) {
    o.fail("delta coefficients off");
  }
  const FusionResult r = solve_ci(problem, CostKind::Det);
  if (r.alpha != 0.0) o.fail("alpha* = " + num(r.alpha));
  double worst = 0.0;
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    auto f = [&](double t) { return 1.0 / sigma_alpha(pair, t).mat().determinant(); };
    const double fd = (f(a + kFdStep) - f(a - kFdStep)) / (2.0 * kFdStep);
    const double exact = 10.0 * (9.0 * a + 13.0) /
                         ((9.0 * a - 10.0) * (9.0 * a - 10.0) * (a + 4.0) * (a + 4.0));
    worst = std::max(worst, std::abs(fd - exact));
  }
  if (worst > kDerivTol) o.fail("derivative error " + num(worst));
  if (o.pass) o.detail = "coeffs (" + num(c(1)) + ", " + num(c(0)) + "), derivative err " + num(worst);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const FusionProblem problem = cifuse::testing::split_problem();
  double worst = 0.0;
  for (double p : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    const JointCovariance joint(SymMatrix::identity(1), Matrix::Constant(1, 1, p),
                                SymMatrix::identity(1));
    const KnownCrossResult k = optimal_fusion_known_cross(problem, joint);
    Matrix expected(2, 2);
    expected << 1, -p, -p, 1;
    expected /= 1.0 - p * p;
    const Matrix info = inverse_pd(k.P_star).mat();
    worst = std::max(worst, max_abs(info - expected));
    const Vector x = Vector::Ones(2);
    const double q = x.dot(info * x);
    worst = std::max(worst, std::abs(q - 2.0 / (1.0 + p)));
    if (!(q > 1.0)) o.fail("corner covered at P12 = " + num(p));
  }
  if (worst > kClosedFormTol) o.fail("closed form error " + num(worst));
  if (o.pass) o.detail = "max error " + num(worst);
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng = make_stream(3003, 0);
  int bad = 0;
  double bsc = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const FusionProblem problem = cifuse::testing::random_problem(rng);
    const JointCovariance joint = cifuse::testing::random_joint(rng, problem);
    const KnownCrossResult r = optimal_fusion_known_cross(problem, joint);
    const Matrix h = problem.H();
    const Matrix hp = h.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::Index m = h.rows();
    for (int s = 0; s < 200; ++s) {
      const Matrix k = hp + gaussian_matrix(rng, problem.n(), m) * (Matrix::Identity(m, m) - h * hp);
      const LoewnerRelation rel = loewner_compare(propagate(k, joint), r.P_star, kLoewnerTol);
      if (rel == LoewnerRelation::LessEqual || rel == LoewnerRelation::StrictlyLess ||
          rel == LoewnerRelation::Incomparable) {
        ++bad;
      }
    }
    // Full-state companion instance of the same size.
    const Eigen::Index n = problem.n();
    const SymMatrix j = random_spd(rng, 2 * n, 0.1, 10.0);
    const JointCovariance fj(SymMatrix(j.mat().topLeftCorner(n, n)), j.mat().topRightCorner(n, n),
                             SymMatrix(j.mat().bottomRightCorner(n, n)));
    const FusionProblem fp(PartialEstimate{Matrix::Identity(n, n), Vector::Zero(n), fj.P1()},
                           PartialEstimate{Matrix::Identity(n, n), Vector::Zero(n), fj.P2()});
    const KnownCrossResult g = optimal_fusion_known_cross(fp, fj);
    const KnownCrossResult b = bar_shalom_campo(fj);
    bsc = std::max({bsc, max_abs(g.K_star - b.K_star), max_abs(g.P_star.mat() - b.P_star.mat())});
  }
  if (bad > 0) o.fail(std::to_string(bad) + " gains below the optimum");
  if (bsc > kBscTol) o.fail("BSC residual " + num(bsc));
  if (o.pass) o.detail = "20000 gains, BSC residual " + num(bsc);
  return o;
}

struct GridMin {
  double alpha;
  double value;
};

GridMin grid_min(const FusionProblem& problem, CostKind cost) {
  GridMin best{0.0, std::numeric_limits<double>::infinity()};
  const SigmaPair pair = sigma_pair(problem);
  for (int i = 0; i < kGrid; ++i) {
    const double a = static_cast<double>(i) / (kGrid - 1);
    const ExtendedValue v = extended_cost(pair, cost, a);
    if (!v.infinite && v.value < best.value) best = {a, v.value};
  }
  return best;
}

struct Instance {
  FusionProblem problem;
  FusionResult result;
};

std::vector<Instance> g_solutions;

Outcome criterion4() {
  Outcome o;
  Rng rng = make_stream(4004, 0);
  double worst_gap = -std::numeric_limits<double>::infinity();
  double worst_alpha = 0.0;
  double worst_fp = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const FusionProblem problem = cifuse::testing::random_problem(rng);
    for (CostKind c : {CostKind::Det, CostKind::Trace}) {
      const FusionResult r = solve_ci(problem, c);
      const GridMin g = grid_min(problem, c);
      const double gap = (r.cost_value - g.value) / std::max(1.0, g.value);
      worst_gap = std::max(worst_gap, gap);
      if (gap > kCostSlack) o.fail("cost above grid minimum, instance " + std::to_string(inst));
      if (c == CostKind::Det) {
        const double da = std::abs(r.alpha - g.alpha);
        worst_alpha = std::max(worst_alpha, da);
        if (da > kAlphaTol) o.fail("det alpha off grid argmin by " + num(da) + ", instance " + std::to_string(inst));
      } else if (r.alpha > 0.0 && r.alpha < 1.0) {
        worst_fp = std::max(worst_fp, r.diag.fixed_point_residual);
        if (!(r.diag.fixed_point_residual <= kFixedPointTol)) o.fail("fixed point residual " + num(r.diag.fixed_point_residual));
      }
      g_solutions.push_back({problem, r});
    }
  }
  if (o.pass) {
    o.detail = "400 solves, max rel gap " + num(worst_gap) + ", max |dalpha| " + num(worst_alpha) +
               ", max residual " + num(worst_fp);
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  if (g_solutions.empty()) {
    o.fail("no solutions from criterion 4");
    return o;
  }
  std::uint64_t seed = 5005;
  double worst_adv = -std::numeric_limits<double>::infinity();
  double worst_mc = -std::numeric_limits<double>::infinity();
  int idx = 0;
  for (const Instance& s : g_solutions) {
    const FusionResult& r = s.result;
    const FusionProblem& p = s.problem;
    const std::string where = " on solution " + std::to_string(idx++);
    if (!lmi_certificate(r, p, r.alpha).passed) o.fail("LMI not PSD" + where);
    if (r.alpha > 0.0 && r.alpha < 1.0) {
      const PetersenResult pet = petersen_certificate(r, p);
      if (!pet.feasible || !pet.tau_feasible) o.fail("Petersen infeasible" + where);
    } else if (!tau_certificate(r, p, r.alpha).passed) {
      o.fail("endpoint inequality fails" + where);
    }
    const double tol = violation_tolerance(r);
    const double adv = adversarial_x_search(r, p, kSamples, seed) / tol;
    const double mc = monte_carlo_joint(r, p, kSamples, seed + 1) / tol;
    ++seed;
    worst_adv = std::max(worst_adv, adv);
    worst_mc = std::max(worst_mc, mc);
    if (adv > 1.0) o.fail("adversarial violation" + where);
    if (mc > 1.0) o.fail("Monte Carlo violation" + where);
  }

  // Mutants on solutions with an interior alpha.
  Rng rng = make_stream(5006, 0);
  std::vector<int> rejected_min(10, 4);
  std::vector<std::string> names(10);
  int used = 0;
  for (const Instance& s : g_solutions) {
    if (used == kMutantInstances) break;
    if (!(s.result.alpha > 0.05 && s.result.alpha < 0.95)) continue;
    ++used;
    const auto mutants = cifuse::testing::make_mutants(s.result, s.problem, rng);
    for (std::size_t i = 0; i < mutants.size(); ++i) {
      const FusionResult& m = mutants[i].result;
      int rejected = 0;
      if (!lmi_feasibility(m, s.problem, kGrid).feasible) ++rejected;
      if (!petersen_certificate(m, s.problem).feasible) ++rejected;
      const double tol = violation_tolerance(m);
      if (adversarial_x_search(m, s.problem, kSamples, seed) > tol) ++rejected;
      if (monte_carlo_joint(m, s.problem, kSamples, seed) > tol) ++rejected;
      ++seed;
      rejected_min[i] = std::min(rejected_min[i], rejected);
      names[i] = mutants[i].name;
    }
  }
  if (used < kMutantInstances) o.fail("too few interior solutions for mutants");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (rejected_min[i] < 2) o.fail("mutant " + names[i] + " rejected by only " + std::to_string(rejected_min[i]));
  }
  if (o.pass) {
    o.detail = std::to_string(g_solutions.size()) + " solutions, worst adversarial/tol " +
               num(worst_adv) + ", worst MC/tol " + num(worst_mc) + ", 10 mutants x " +
               std::to_string(used) + " rejected";
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  Rng rng = make_stream(6006, 0);
  int checked = 0;
  while (checked < 50) {
    const FusionProblem problem = cifuse::testing::random_problem(rng);
    if (loewner_compare(problem.sigma0(), problem.sigma1()) == LoewnerRelation::Equal) continue;
    const FusionResult r = solve_ci(problem, CostKind::Det);
    const UniquenessReport u = alpha_uniqueness_check(r, problem, kGrid);
    if (u.verdict != UniquenessVerdict::Unique) {
      o.fail("instance " + std::to_string(checked) + ": feasible [" + num(u.feasible_lo) + ", " +
             num(u.feasible_hi) + "] vs alpha " + num(r.alpha));
    }
    ++checked;
  }
  if (o.pass) o.detail = "50 instances isolated within one cell";
  return o;
}

Outcome criterion7() {
  Outcome o;
  int violations = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto run = [&] {
      Network net = init_network(3, 5, seed, Preset::Random);
      return run_schedule(net, make_schedule(Topology::Ring, 5, 20, seed, CostKind::Det));
    };
    const SimReport a = run();
    const SimReport b = run();
    violations += a.violations;
    if (a.to_text() != b.to_text()) o.fail("report differs for seed " + std::to_string(seed));
  }
  if (violations > 0) o.fail(std::to_string(violations) + " violations");
  if (o.pass) o.detail = "10 seeds, 0 violations, reports identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"two_sensor_reproduction", criterion1},  {"split_reproduction", criterion2},
      {"gauss_markov_minimality", criterion3}, {"ci_optimality", criterion4},
      {"conservativeness_suite", criterion5},  {"alpha_uniqueness", criterion6},
      {"network_simulation", criterion7},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > kBudget[i]) o.fail("runtime " + num(secs) + " s over budget " + num(kBudget[i]) + " s");
    if (!o.pass) ++failures;
    std::printf("%s %zu %-24s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
