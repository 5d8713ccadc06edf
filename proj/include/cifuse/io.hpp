#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cifuse/ci.hpp"
#include "cifuse/known_cross.hpp"

namespace cifuse {

struct TruthBlock {
  SymMatrix P1;
  SymMatrix P2;
  Matrix P12;
};

struct ProblemFile {
  FusionProblem problem;
  std::optional<TruthBlock> truth;
  std::optional<SymMatrix> P_hat_override;
};

/// Parses a problem document. Shape and type errors are ParseError with the
/// JSON path of the offending value; the problem itself is then validated.
ProblemFile parse_problem_json(const std::string& text);
ProblemFile load_problem_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// %.17g, or "null" for non-finite values.
std::string format_number(double v);

std::string result_to_json(const FusionResult& result);
/// Reads back what result_to_json wrote. Diagnostics other than the branch
/// name are not restored.
FusionResult result_from_json(const std::string& text);

/// alpha,cost,finite,argmin rows over a uniform grid.
std::string scan_csv(const FusionProblem& problem, CostKind cost, int grid);

struct VerifyRow {
  std::string check;
  bool passed;
  double value;
  std::string detail;
};

struct VerifyReport {
  double alpha;
  std::vector<VerifyRow> rows;
  bool all_passed;

  std::string to_text() const;
};

/// Runs the LMI, Petersen, adversarial and Monte Carlo checks on the CI
/// solution, or on `supplied` when given. A P_hat_override in the file
/// replaces the covariance of whichever result is checked.
VerifyReport run_verify(const ProblemFile& file, CostKind cost, int samples, std::uint64_t seed,
                        const FusionResult* supplied = nullptr);

/// Gauss-Markov fusion with the file's truth block, as JSON.
std::string known_report_json(const ProblemFile& file);

}  // namespace cifuse
