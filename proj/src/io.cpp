#include "cifuse/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cifuse/verify.hpp"

namespace cifuse {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(path, "non-finite number");
  return v;
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) parse_fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

// Accepts nested rows or a flat row-major array. rows < 0 means "infer".
Matrix parse_matrix(const json& j, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a non-empty array");
  Matrix m;
  if (j.front().is_array()) {
    const Eigen::Index r = static_cast<Eigen::Index>(j.size());
    const Eigen::Index c = static_cast<Eigen::Index>(j.front().size());
    m.resize(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      const json& row = j[static_cast<std::size_t>(i)];
      const std::string rp = path + "[" + std::to_string(i) + "]";
      if (!row.is_array()) parse_fail(rp, "expected an array");
      if (static_cast<Eigen::Index>(row.size()) != c) {
        parse_fail(rp, "row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(c));
      }
      for (Eigen::Index k = 0; k < c; ++k) {
        m(i, k) = number_at(row[static_cast<std::size_t>(k)],
                            rp + "[" + std::to_string(k) + "]");
      }
    }
  } else {
    const Eigen::Index len = static_cast<Eigen::Index>(j.size());
    if (cols <= 0 || len % cols != 0) {
      parse_fail(path, "flat array of length " + std::to_string(len) +
                           " is not a whole number of rows of length " + std::to_string(cols));
    }
    m.resize(len / cols, cols);
    for (Eigen::Index i = 0; i < len; ++i) {
      m(i / cols, i % cols) =
          number_at(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    }
  }
  if ((rows >= 0 && m.rows() != rows) || m.cols() != cols) {
    std::ostringstream os;
    os << "matrix is " << m.rows() << "x" << m.cols() << ", expected ";
    if (rows >= 0) {
      os << rows;
    } else {
      os << "p";
    }
    os << "x" << cols;
    parse_fail(path, os.str());
  }
  return m;
}

Vector parse_vector(const json& j, const std::string& path, Eigen::Index len) {
  if (!j.is_array()) parse_fail(path, "expected an array");
  if (static_cast<Eigen::Index>(j.size()) != len) {
    parse_fail(path, "has length " + std::to_string(j.size()) + ", expected " + std::to_string(len));
  }
  Vector v(len);
  for (Eigen::Index i = 0; i < len; ++i) {
    v(i) = number_at(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

SymMatrix parse_sym(const json& j, const std::string& path, Eigen::Index dim) {
  const Matrix m = parse_matrix(j, path, dim, dim);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    parse_fail(path, "matrix is not symmetric");
  }
  return SymMatrix(m);
}

PartialEstimate parse_estimate(const json& j, const std::string& path, Eigen::Index n) {
  const Matrix h = parse_matrix(member(j, "H", path), join(path, "H"), -1, n);
  const Eigen::Index p = h.rows();
  const Vector x = parse_vector(member(j, "x_hat", path), join(path, "x_hat"), p);
  const SymMatrix ph = parse_sym(member(j, "P_hat", path), join(path, "P_hat"), p);
  return PartialEstimate{h, x, ph};
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

std::string matrix_json(const Matrix& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) s += ", ";
    s += "[";
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (k) s += ", ";
      s += format_number(m(i, k));
    }
    s += "]";
  }
  return s + "]";
}

std::string vector_json(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v(i));
  }
  return s + "]";
}

std::string quote(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ProblemFile parse_problem_json(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) parse_fail("$", "expected an object");
  const json& jn = member(doc, "n", "");
  if (!jn.is_number_integer() || jn.get<long long>() < 1) parse_fail("n", "expected a positive integer");
  const Eigen::Index n = static_cast<Eigen::Index>(jn.get<long long>());
  PartialEstimate e1 = parse_estimate(member(doc, "est1", ""), "est1", n);
  PartialEstimate e2 = parse_estimate(member(doc, "est2", ""), "est2", n);
  const Eigen::Index p1 = e1.H.rows();
  const Eigen::Index p2 = e2.H.rows();

  std::optional<TruthBlock> truth;
  if (auto it = doc.find("truth"); it != doc.end()) {
    truth = TruthBlock{parse_sym(member(*it, "P1", "truth"), "truth.P1", p1),
                       parse_sym(member(*it, "P2", "truth"), "truth.P2", p2),
                       parse_matrix(member(*it, "P12", "truth"), "truth.P12", p1, p2)};
  }
  std::optional<SymMatrix> override_p;
  if (auto it = doc.find("P_hat_override"); it != doc.end()) {
    override_p = parse_sym(*it, "P_hat_override", n);
  }
  return ProblemFile{FusionProblem(std::move(e1), std::move(e2)), truth, override_p};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "write to '" + path + "' failed");
}

ProblemFile load_problem_file(const std::string& path) {
  return parse_problem_json(read_text_file(path));
}

std::string result_to_json(const FusionResult& r) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"alpha\": " << format_number(r.alpha) << ",\n";
  os << "  \"cost\": " << quote(to_string(r.cost)) << ",\n";
  os << "  \"cost_value\": " << format_number(r.cost_value) << ",\n";
  os << "  \"branch\": " << quote(to_string(r.diag.branch)) << ",\n";
  os << "  \"relation\": " << quote(to_string(r.diag.relation)) << ",\n";
  if (r.diag.branch == Branch::Degenerate) {
    os << "  \"note\": \"degenerate: any alpha optimal\",\n";
  }
  if (r.diag.has_delta) {
    os << "  \"delta0\": " << format_number(r.diag.delta0) << ",\n";
    os << "  \"delta1\": " << format_number(r.diag.delta1) << ",\n";
  }
  if (r.diag.has_fixed_point) {
    os << "  \"fixed_point_residual\": " << format_number(r.diag.fixed_point_residual) << ",\n";
  }
  if (r.diag.has_lmi) {
    os << "  \"lmi_min_eig\": " << format_number(r.diag.lmi_min_eig) << ",\n";
  }
  os << "  \"K1\": " << matrix_json(r.K1) << ",\n";
  os << "  \"K2\": " << matrix_json(r.K2) << ",\n";
  os << "  \"P_hat\": " << matrix_json(r.P_hat.mat()) << ",\n";
  os << "  \"fused_x\": " << vector_json(r.fused_x) << "\n";
  os << "}\n";
  return os.str();
}

FusionResult result_from_json(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) parse_fail("$", "expected an object");
  const double alpha = number_at(member(doc, "alpha", ""), "alpha");
  const json& jc = member(doc, "cost", "");
  if (!jc.is_string()) parse_fail("cost", "expected \"det\" or \"trace\"");
  const CostKind cost = cost_from_string(jc.get<std::string>());
  const json& jp = member(doc, "P_hat", "");
  if (!jp.is_array() || jp.empty()) parse_fail("P_hat", "expected a non-empty array");
  const Eigen::Index n = static_cast<Eigen::Index>(jp.size());
  const SymMatrix p_hat = parse_sym(jp, "P_hat", n);
  const Matrix k1 = parse_matrix(member(doc, "K1", ""), "K1", n,
                                 static_cast<Eigen::Index>(member(doc, "K1", "").front().size()));
  const Matrix k2 = parse_matrix(member(doc, "K2", ""), "K2", n,
                                 static_cast<Eigen::Index>(member(doc, "K2", "").front().size()));
  const Vector x = parse_vector(member(doc, "fused_x", ""), "fused_x", n);
  const double value = number_at(member(doc, "cost_value", ""), "cost_value");
  Diagnostics diag;
  if (auto it = doc.find("branch"); it != doc.end() && it->is_string()) {
    for (int b = 0; b <= static_cast<int>(Branch::GoldenSection); ++b) {
      if (it->get<std::string>() == to_string(static_cast<Branch>(b))) diag.branch = static_cast<Branch>(b);
    }
  }
  return FusionResult{alpha, k1, k2, p_hat, x, cost, value, diag};
}

std::string scan_csv(const FusionProblem& problem, CostKind cost, int grid) {
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "--grid must be >= 2");
  const SigmaPair pair = sigma_pair(problem);
  std::vector<ExtendedValue> values;
  int best = -1;
  for (int i = 0; i < grid; ++i) {
    const double a = static_cast<double>(i) / (grid - 1);
    values.push_back(extended_cost(pair, cost, a));
    if (!values.back().infinite && (best < 0 || values.back() < values[static_cast<std::size_t>(best)])) {
      best = i;
    }
  }
  std::ostringstream os;
  os << "alpha,cost,finite,argmin\n";
  for (int i = 0; i < grid; ++i) {
    const ExtendedValue& v = values[static_cast<std::size_t>(i)];
    os << format_number(static_cast<double>(i) / (grid - 1)) << ",";
    if (!v.infinite) os << format_number(v.value);
    os << "," << (v.infinite ? 0 : 1) << "," << (i == best ? 1 : 0) << "\n";
  }
  return os.str();
}

VerifyReport run_verify(const ProblemFile& file, CostKind cost, int samples, std::uint64_t seed,
                        const FusionResult* supplied) {
  const FusionProblem& problem = file.problem;
  FusionResult r = supplied ? *supplied : solve_ci(problem, cost);
  if (r.K1.rows() != problem.n() || r.K1.cols() != problem.p1() || r.K2.cols() != problem.p2()) {
    throw Error(ErrorCode::DimensionMismatch, "result does not match the problem");
  }
  if (file.P_hat_override) r.P_hat = *file.P_hat_override;
  const double tol = violation_tolerance(r);

  VerifyReport rep{r.alpha, {}, true};
  const ConservativenessCertificate lmi = lmi_certificate(r, problem, r.alpha);
  rep.rows.push_back({"lmi", lmi.passed, lmi.lmi_min_eig, "smallest eigenvalue at alpha"});

  try {
    const PetersenResult pet = petersen_certificate(r, problem);
    std::string detail = "eps = " + format_number(pet.epsilon);
    if (pet.tau) detail += ", tau = 1/alpha - 1 " + std::string(pet.tau_feasible ? "feasible" : "infeasible");
    rep.rows.push_back({"petersen", pet.feasible, pet.min_value, detail});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateQ) throw;
    const ConservativenessCertificate direct = tau_certificate(r, problem, r.alpha);
    rep.rows.push_back({"petersen", direct.passed, direct.lmi_min_eig,
                        "degenerate Q, direct inequality"});
  }

  const double adv = adversarial_x_search(r, problem, samples, seed);
  rep.rows.push_back({"adversarial", adv <= tol, adv,
                      "worst lambda_max over " + std::to_string(samples) + " samples"});
  const double mc = monte_carlo_joint(r, problem, samples, seed);
  rep.rows.push_back({"monte_carlo", mc <= tol, mc,
                      "worst lambda_max over " + std::to_string(samples) + " joints"});

  if (file.truth) {
    const JointCovariance joint(file.truth->P1, file.truth->P12, file.truth->P2);
    const double tv = joint_violation(r, joint);
    rep.rows.push_back({"truth", tv <= tol, tv, "lambda_max(K Pjoint K^T - P_hat)"});
  }
  for (const VerifyRow& row : rep.rows) rep.all_passed = rep.all_passed && row.passed;
  return rep;
}

std::string VerifyReport::to_text() const {
  std::ostringstream os;
  os << "alpha " << format_number(alpha) << "\n";
  char line[256];
  for (const VerifyRow& r : rows) {
    std::snprintf(line, sizeof line, "%-12s %-5s %-24s %s\n", r.check.c_str(),
                  r.passed ? "pass" : "FAIL", format_number(r.value).c_str(), r.detail.c_str());
    os << line;
  }
  os << "verdict " << (all_passed ? "pass" : "FAIL") << "\n";
  return os.str();
}

std::string known_report_json(const ProblemFile& file) {
  if (!file.truth) {
    throw Error(ErrorCode::InvalidArgument, "known-cross fusion needs a truth block with P1, P2, P12");
  }
  const FusionProblem& problem = file.problem;
  const JointCovariance joint(file.truth->P1, file.truth->P12, file.truth->P2);
  const KnownCrossResult k = optimal_fusion_known_cross(problem, joint);
  const Vector x = k.K1(problem.p1()) * problem.est1().x_hat + k.K2(problem.p2()) * problem.est2().x_hat;

  std::ostringstream os;
  os << "{\n";
  os << "  \"K_star\": " << matrix_json(k.K_star) << ",\n";
  os << "  \"P_star\": " << matrix_json(k.P_star.mat()) << ",\n";
  os << "  \"P_star_inv\": " << matrix_json(inverse_pd(k.P_star).mat()) << ",\n";
  os << "  \"fused_x\": " << vector_json(x) << ",\n";
  os << "  \"warnings\": [";
  for (std::size_t i = 0; i < k.warnings.size(); ++i) os << (i ? ", " : "") << quote(k.warnings[i]);
  os << "]";
  const Eigen::Index n = problem.n();
  const bool full_state = problem.p1() == n && problem.p2() == n &&
                          problem.est1().H.isIdentity(0.0) && problem.est2().H.isIdentity(0.0);
  if (full_state) {
    const KnownCrossResult b = bar_shalom_campo(joint);
    const double residual = std::max((b.K_star - k.K_star).cwiseAbs().maxCoeff(),
                                     (b.P_star.mat() - k.P_star.mat()).cwiseAbs().maxCoeff());
    os << ",\n  \"bsc\": {\n";
    os << "    \"K1\": " << matrix_json(b.K1(n)) << ",\n";
    os << "    \"K2\": " << matrix_json(b.K2(n)) << ",\n";
    os << "    \"P_star\": " << matrix_json(b.P_star.mat()) << ",\n";
    os << "    \"residual\": " << format_number(residual) << "\n  }";
  }
  os << "\n}\n";
  return os.str();
}

}  // namespace cifuse
