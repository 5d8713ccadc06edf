/* C interface to the cifuse library.
 *
 * Handles are opaque and owned by the caller; free them with the matching
 * *_free function. Strings returned through char** out-parameters must be
 * released with cif_string_free. Matrices are passed row-major.
 *
 * Every function returning cif_status stores a message retrievable with
 * cif_last_error() on failure. The message is per thread and stays valid
 * until the next failing call on that thread.
 */
#ifndef CIFUSE_CIFUSE_H
#define CIFUSE_CIFUSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CIFUSE_BUILDING)
#    define CIF_API __declspec(dllexport)
#  else
#    define CIF_API __declspec(dllimport)
#  endif
#else
#  define CIF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cif_problem cif_problem;
typedef struct cif_result cif_result;

/* Values match the command-line exit codes. */
typedef enum cif_status {
  CIF_OK = 0,
  CIF_CERT_FAILED = 1,
  CIF_INPUT_ERROR = 2,
  CIF_INTERNAL_ERROR = 3
} cif_status;

typedef enum cif_cost { CIF_COST_DET = 0, CIF_COST_TRACE = 1 } cif_cost;

CIF_API const char* cif_last_error(void);
CIF_API void cif_string_free(char* s);

/* Problems */
CIF_API cif_status cif_problem_from_json(const char* json, cif_problem** out);
CIF_API cif_status cif_problem_load(const char* path, cif_problem** out);
/* H1 is p1 x n, P1 is p1 x p1, x1 has length p1; likewise for the second
 * estimate. */
CIF_API cif_status cif_problem_create(int n, int p1, const double* H1, const double* x1,
                                      const double* P1, int p2, const double* H2,
                                      const double* x2, const double* P2, cif_problem** out);
CIF_API void cif_problem_free(cif_problem* problem);
CIF_API int cif_problem_dim(const cif_problem* problem);

/* Fusion */
CIF_API cif_status cif_solve(const cif_problem* problem, cif_cost cost, cif_result** out);
CIF_API cif_status cif_ku_rule(const cif_problem* problem, double alpha, cif_cost cost,
                               cif_result** out);
CIF_API void cif_result_free(cif_result* result);

CIF_API double cif_result_alpha(const cif_result* result);
CIF_API double cif_result_cost_value(const cif_result* result);
CIF_API int cif_result_dim(const cif_result* result);
/* Name of the branch that selected alpha; owned by the library. */
CIF_API const char* cif_result_branch(const cif_result* result);
/* Copy into caller buffers; len is the number of doubles available. */
CIF_API cif_status cif_result_P_hat(const cif_result* result, double* out, size_t len);
CIF_API cif_status cif_result_fused_x(const cif_result* result, double* out, size_t len);
CIF_API cif_status cif_result_K1(const cif_result* result, double* out, size_t len);
CIF_API cif_status cif_result_K2(const cif_result* result, double* out, size_t len);

CIF_API cif_status cif_result_to_json(const cif_result* result, char** out);
CIF_API cif_status cif_result_from_json(const char* json, cif_result** out);

/* Reports. The return value of cif_verify is CIF_OK only when every check
 * passes and CIF_CERT_FAILED when one fails; the report is written in both
 * cases. `supplied` may be NULL to verify the CI solution. */
CIF_API cif_status cif_scan_csv(const cif_problem* problem, cif_cost cost, int grid, char** out);
CIF_API cif_status cif_verify(const cif_problem* problem, cif_cost cost, int samples,
                              uint64_t seed, const cif_result* supplied, char** report);
CIF_API cif_status cif_known_json(const cif_problem* problem, char** out);

/* Network simulation. topology: "chain", "ring" or "random"; preset:
 * "random", "split", "identity" or "collinear". Returns CIF_CERT_FAILED
 * when any event is not conservative, CIF_INPUT_ERROR when the full state
 * is unreachable. */
CIF_API cif_status cif_sim(int n, int nodes, const char* topology, int events, uint64_t seed,
                           cif_cost cost, const char* preset, char** report);

#ifdef __cplusplus
}
#endif

#endif /* CIFUSE_CIFUSE_H */
