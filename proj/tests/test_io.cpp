#include <gtest/gtest.h>

#include <limits>
#include <sstream>
#include <string>

#include "cifuse/io.hpp"
#include "support.hpp"

using namespace cifuse;
using cifuse::testing::max_abs;

namespace {

std::string data(const char* name) { return std::string(CIFUSE_TEST_DATA) + "/" + name; }

ErrorCode parse_code(const std::string& text, std::string* message = nullptr) {
  try {
    parse_problem_json(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorCode::InternalInconsistency;
}

}  // namespace

TEST(Parse, TwoSensorFile) {
  const ProblemFile f = load_problem_file(data("two_sensor.json"));
  EXPECT_EQ(f.problem.n(), 2);
  EXPECT_NEAR(f.problem.est2().P_hat(0, 0), 1.25, 0.0);
  EXPECT_FALSE(f.truth.has_value());
  EXPECT_FALSE(f.P_hat_override.has_value());
}

TEST(Parse, FlatArraysMatchNested) {
  const ProblemFile flat = load_problem_file(data("identity_independent.json"));
  EXPECT_LE(max_abs(flat.problem.est1().H - Matrix::Identity(2, 2)), 0.0);
  ASSERT_TRUE(flat.truth.has_value());
  EXPECT_LE(max_abs(flat.truth->P12), 0.0);
}

TEST(Parse, ErrorsNameThePath) {
  std::string msg;
  EXPECT_EQ(parse_code("{", &msg), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"est1": {}, "est2": {}})", &msg), ErrorCode::ParseError);
  EXPECT_NE(msg.find("n"), std::string::npos);

  const std::string bad_entry = R"({"n": 1,
    "est1": {"H": [[1]], "x_hat": [0], "P_hat": [["x"]]},
    "est2": {"H": [[1]], "x_hat": [0], "P_hat": [[1]]}})";
  EXPECT_EQ(parse_code(bad_entry, &msg), ErrorCode::ParseError);
  EXPECT_NE(msg.find("est1.P_hat[0][0]"), std::string::npos) << msg;

  const std::string ragged = R"({"n": 2,
    "est1": {"H": [[1, 0], [0]], "x_hat": [0, 0], "P_hat": [[1, 0], [0, 1]]},
    "est2": {"H": [[1, 0], [0, 1]], "x_hat": [0, 0], "P_hat": [[1, 0], [0, 1]]}})";
  EXPECT_EQ(parse_code(ragged, &msg), ErrorCode::ParseError);
  EXPECT_NE(msg.find("est1.H[1]"), std::string::npos) << msg;

  const std::string asym = R"({"n": 2,
    "est1": {"H": [[1, 0], [0, 1]], "x_hat": [0, 0], "P_hat": [[1, 0.5], [0, 1]]},
    "est2": {"H": [[1, 0], [0, 1]], "x_hat": [0, 0], "P_hat": [[1, 0], [0, 1]]}})";
  EXPECT_EQ(parse_code(asym, &msg), ErrorCode::ParseError);
  EXPECT_NE(msg.find("est1.P_hat"), std::string::npos) << msg;
}

TEST(Parse, ValidationErrorsKeepTheirCodes) {
  try {
    load_problem_file(data("rank_deficient.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AssumptionViolated);
  }
  EXPECT_THROW(load_problem_file(data("does_not_exist.json")), Error);
}

TEST(Json, ResultRoundTrip) {
  Rng rng = make_stream(501, 0);
  for (int inst = 0; inst < 20; ++inst) {
    const FusionProblem problem = cifuse::testing::random_problem(rng);
    const FusionResult r = solve_ci(problem, inst % 2 ? CostKind::Trace : CostKind::Det);
    const std::string text = result_to_json(r);
    const FusionResult back = result_from_json(text);
    EXPECT_EQ(back.alpha, r.alpha);
    EXPECT_EQ(back.cost, r.cost);
    EXPECT_EQ(back.diag.branch, r.diag.branch);
    EXPECT_EQ(max_abs(back.K1 - r.K1), 0.0);
    EXPECT_EQ(max_abs(back.K2 - r.K2), 0.0);
    EXPECT_EQ(max_abs(back.P_hat.mat() - r.P_hat.mat()), 0.0);
  }
}

TEST(Json, DegenerateNote) {
  const ProblemFile f = load_problem_file(data("equal_sigma.json"));
  const std::string text = result_to_json(solve_ci(f.problem, CostKind::Det));
  EXPECT_NE(text.find("degenerate: any alpha optimal"), std::string::npos);
  EXPECT_NE(text.find("\"alpha\": 0.5"), std::string::npos) << text;
}

TEST(Json, FormatNumber) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "null");
}

TEST(Scan, TwoSensorIncreasing) {
  const ProblemFile f = load_problem_file(data("two_sensor.json"));
  const std::string csv = scan_csv(f.problem, CostKind::Det, 11);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,cost,finite,argmin");
  double prev = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto c1 = line.find(',');
    const double cost = std::stod(line.substr(c1 + 1));
    EXPECT_GT(cost, prev);
    prev = cost;
    if (rows == 1) EXPECT_EQ(line.substr(line.rfind(',') + 1), "1");
  }
  EXPECT_EQ(rows, 11);
}

TEST(Scan, SingularEndpointAndTwoPointGrid) {
  const ProblemFile f = load_problem_file(data("singular_sigma0.json"));
  const std::string csv = scan_csv(f.problem, CostKind::Det, 2);
  std::istringstream in(csv);
  std::string header, first, second, extra;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(first.substr(0, 3), "0,,");
  EXPECT_NE(first.find(",0,"), std::string::npos) << first;
  EXPECT_EQ(second.substr(0, 2), "1,");
  EXPECT_THROW(scan_csv(f.problem, CostKind::Det, 1), Error);
}

TEST(Verify, TwoSensorAllPass) {
  const ProblemFile f = load_problem_file(data("two_sensor.json"));
  const VerifyReport rep = run_verify(f, CostKind::Det, 200, 1);
  EXPECT_TRUE(rep.all_passed) << rep.to_text();
}

TEST(Verify, OverrideIsCaught) {
  const ProblemFile f = load_problem_file(data("split_override.json"));
  const VerifyReport rep = run_verify(f, CostKind::Det, 200, 1);
  EXPECT_FALSE(rep.all_passed);
  bool adversarial_failed = false;
  for (const auto& row : rep.rows) {
    if (row.check == "adversarial" && !row.passed) adversarial_failed = true;
  }
  EXPECT_TRUE(adversarial_failed) << rep.to_text();
}

TEST(Verify, TruthBlockChecked) {
  const ProblemFile f = load_problem_file(data("full_state_truth.json"));
  const VerifyReport rep = run_verify(f, CostKind::Det, 200, 1);
  bool has_truth = false;
  for (const auto& row : rep.rows) has_truth |= row.check == "truth";
  EXPECT_TRUE(has_truth);
  EXPECT_TRUE(rep.all_passed) << rep.to_text();
}

TEST(Verify, ReingestedResultGivesSameReport) {
  const ProblemFile f = load_problem_file(data("full_state_truth.json"));
  const FusionResult r = solve_ci(f.problem, CostKind::Det);
  const FusionResult back = result_from_json(result_to_json(r));
  EXPECT_EQ(run_verify(f, CostKind::Det, 100, 5).to_text(),
            run_verify(f, CostKind::Det, 100, 5, &back).to_text());
}

TEST(Known, SplitClosedForm) {
  const ProblemFile f = load_problem_file(data("split.json"));
  const std::string text = known_report_json(f);
  EXPECT_NE(text.find("P_star_inv"), std::string::npos);
  EXPECT_EQ(text.find("bsc"), std::string::npos);
}

TEST(Known, FullStateHasBsc) {
  const ProblemFile f = load_problem_file(data("seeded_n3.json"));
  const std::string text = known_report_json(f);
  EXPECT_NE(text.find("bsc"), std::string::npos);
  EXPECT_THROW(known_report_json(load_problem_file(data("two_sensor.json"))), Error);
}
