#include "cifuse/cifuse.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "cifuse/io.hpp"
#include "cifuse/network.hpp"

struct cif_problem {
  cifuse::ProblemFile file;
};

struct cif_result {
  cifuse::FusionResult result;
};

namespace {

thread_local std::string g_last_error;

cif_status fail(cif_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Maps exceptions onto status codes at the ABI boundary.
template <class F>
cif_status guarded(F&& f) {
  try {
    return f();
  } catch (const cifuse::Error& e) {
    return fail(cifuse::is_input_error(e.code()) ? CIF_INPUT_ERROR : CIF_INTERNAL_ERROR,
                std::string(cifuse::to_string(e.code())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return fail(CIF_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CIF_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(CIF_INTERNAL_ERROR, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cifuse::CostKind to_cost(cif_cost c) {
  switch (c) {
    case CIF_COST_DET: return cifuse::CostKind::Det;
    case CIF_COST_TRACE: return cifuse::CostKind::Trace;
  }
  throw cifuse::Error(cifuse::ErrorCode::InvalidArgument, "unknown cost");
}

cifuse::Matrix row_major(const double* data, int rows, int cols) {
  if (!data) throw cifuse::Error(cifuse::ErrorCode::InvalidArgument, "null matrix pointer");
  cifuse::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i) * cols + k];
  }
  return m;
}

cif_status copy_out(const cifuse::Matrix& m, double* out, std::size_t len) {
  const std::size_t need = static_cast<std::size_t>(m.rows() * m.cols());
  if (!out || len < need) {
    return fail(CIF_INPUT_ERROR, "output buffer needs " + std::to_string(need) + " doubles");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      out[static_cast<std::size_t>(i * m.cols() + k)] = m(i, k);
    }
  }
  return CIF_OK;
}

template <class T>
cif_status need(const T* p, const char* what) {
  if (!p) return fail(CIF_INPUT_ERROR, std::string("null ") + what);
  return CIF_OK;
}

}  // namespace

extern "C" {

const char* cif_last_error(void) { return g_last_error.c_str(); }

void cif_string_free(char* s) { std::free(s); }

cif_status cif_problem_from_json(const char* json, cif_problem** out) {
  if (!json || !out) return fail(CIF_INPUT_ERROR, "null argument");
  return guarded([&] {
    *out = new cif_problem{cifuse::parse_problem_json(json)};
    return CIF_OK;
  });
}

cif_status cif_problem_load(const char* path, cif_problem** out) {
  if (!path || !out) return fail(CIF_INPUT_ERROR, "null argument");
  return guarded([&] {
    *out = new cif_problem{cifuse::load_problem_file(path)};
    return CIF_OK;
  });
}

cif_status cif_problem_create(int n, int p1, const double* H1, const double* x1, const double* P1,
                              int p2, const double* H2, const double* x2, const double* P2,
                              cif_problem** out) {
  if (!out) return fail(CIF_INPUT_ERROR, "null argument");
  if (n < 1 || p1 < 1 || p2 < 1) return fail(CIF_INPUT_ERROR, "dimensions must be positive");
  return guarded([&] {
    cifuse::PartialEstimate e1{row_major(H1, p1, n), row_major(x1, p1, 1).col(0),
                               cifuse::SymMatrix(row_major(P1, p1, p1))};
    cifuse::PartialEstimate e2{row_major(H2, p2, n), row_major(x2, p2, 1).col(0),
                               cifuse::SymMatrix(row_major(P2, p2, p2))};
    *out = new cif_problem{
        cifuse::ProblemFile{cifuse::FusionProblem(std::move(e1), std::move(e2)), std::nullopt,
                            std::nullopt}};
    return CIF_OK;
  });
}

void cif_problem_free(cif_problem* problem) { delete problem; }

int cif_problem_dim(const cif_problem* problem) {
  return problem ? static_cast<int>(problem->file.problem.n()) : -1;
}

cif_status cif_solve(const cif_problem* problem, cif_cost cost, cif_result** out) {
  if (!problem || !out) return fail(CIF_INPUT_ERROR, "null argument");
  return guarded([&] {
    *out = new cif_result{cifuse::solve_ci(problem->file.problem, to_cost(cost))};
    return CIF_OK;
  });
}

cif_status cif_ku_rule(const cif_problem* problem, double alpha, cif_cost cost, cif_result** out) {
  if (!problem || !out) return fail(CIF_INPUT_ERROR, "null argument");
  return guarded([&] {
    *out = new cif_result{cifuse::ku_rule(problem->file.problem, alpha, to_cost(cost))};
    return CIF_OK;
  });
}

void cif_result_free(cif_result* result) { delete result; }

double cif_result_alpha(const cif_result* result) {
  return result ? result->result.alpha : 0.0;
}

double cif_result_cost_value(const cif_result* result) {
  return result ? result->result.cost_value : 0.0;
}

int cif_result_dim(const cif_result* result) {
  return result ? static_cast<int>(result->result.P_hat.dim()) : -1;
}

const char* cif_result_branch(const cif_result* result) {
  return result ? cifuse::to_string(result->result.diag.branch) : "";
}

cif_status cif_result_P_hat(const cif_result* result, double* out, size_t len) {
  if (cif_status s = need(result, "result"); s != CIF_OK) return s;
  return copy_out(result->result.P_hat.mat(), out, len);
}

cif_status cif_result_fused_x(const cif_result* result, double* out, size_t len) {
  if (cif_status s = need(result, "result"); s != CIF_OK) return s;
  return copy_out(result->result.fused_x, out, len);
}

cif_status cif_result_K1(const cif_result* result, double* out, size_t len) {
  if (cif_status s = need(result, "result"); s != CIF_OK) return s;
  return copy_out(result->result.K1, out, len);
}

cif_status cif_result_K2(const cif_result* result, double* out, size_t len) {
  if (cif_status s = need(result, "result"); s != CIF_OK) return s;
  return copy_out(result->result.K2, out, len);
}

cif_status cif_result_to_json(const cif_result* result, char** out) {
  if (!result || !out) return fail(CIF_INPUT_ERROR, "null argument");
  return guarded([&] {
    *out = dup_string(cifuse::result_to_json(result->result));
    return CIF_OK;
  });
}

cif_status cif_result_from_json(const char* json, cif_result** out) {
  if (!json || !out) return fail(CIF_INPUT_ERROR, "null argument");
  return guarded([&] {
    *out = new cif_result{cifuse::result_from_json(json)};
    return CIF_OK;
  });
}

cif_status cif_scan_csv(const cif_problem* problem, cif_cost cost, int grid, char** out) {
  if (!problem || !out) return fail(CIF_INPUT_ERROR, "null argument");
  return guarded([&] {
    *out = dup_string(cifuse::scan_csv(problem->file.problem, to_cost(cost), grid));
    return CIF_OK;
  });
}

cif_status cif_verify(const cif_problem* problem, cif_cost cost, int samples, uint64_t seed,
                      const cif_result* supplied, char** report) {
  if (!problem || !report) return fail(CIF_INPUT_ERROR, "null argument");
  return guarded([&] {
    const cifuse::VerifyReport rep = cifuse::run_verify(
        problem->file, to_cost(cost), samples, seed, supplied ? &supplied->result : nullptr);
    *report = dup_string(rep.to_text());
    if (!rep.all_passed) return fail(CIF_CERT_FAILED, "conservativeness certificate failed");
    return CIF_OK;
  });
}

cif_status cif_known_json(const cif_problem* problem, char** out) {
  if (!problem || !out) return fail(CIF_INPUT_ERROR, "null argument");
  return guarded([&] {
    *out = dup_string(cifuse::known_report_json(problem->file));
    return CIF_OK;
  });
}

cif_status cif_sim(int n, int nodes, const char* topology, int events, uint64_t seed,
                   cif_cost cost, const char* preset, char** report) {
  if (!topology || !preset || !report) return fail(CIF_INPUT_ERROR, "null argument");
  *report = nullptr;
  return guarded([&] {
    const cifuse::CostKind c = to_cost(cost);
    cifuse::Network net = cifuse::init_network(n, nodes, seed, cifuse::preset_from_string(preset));
    const cifuse::Schedule schedule =
        cifuse::make_schedule(cifuse::topology_from_string(topology), nodes, events, seed, c);
    const cifuse::SimReport rep = cifuse::run_schedule(net, schedule);
    std::string header = "# nodes=" + std::to_string(nodes) + " n=" + std::to_string(n) +
                         " topology=" + topology + " events=" + std::to_string(events) +
                         " seed=" + std::to_string(seed) + " cost=" + cifuse::to_string(c) +
                         " preset=" + preset + "\n";
    *report = dup_string(header + rep.to_text());
    if (rep.violations > 0) {
      return fail(CIF_CERT_FAILED, std::to_string(rep.violations) + " conservativeness violations");
    }
    return CIF_OK;
  });
}

}  // extern "C"
