// Command-line front end. Talks to the library only through the C interface.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "cifuse/cifuse.h"

namespace {

struct ProblemDeleter {
  void operator()(cif_problem* p) const { cif_problem_free(p); }
};
struct ResultDeleter {
  void operator()(cif_result* r) const { cif_result_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { cif_string_free(s); }
};
using ProblemPtr = std::unique_ptr<cif_problem, ProblemDeleter>;
using ResultPtr = std::unique_ptr<cif_result, ResultDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int report_error(cif_status s) {
  std::cerr << "error: " << cif_last_error() << "\n";
  return static_cast<int>(s);
}

int emit(const char* text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return CIF_INPUT_ERROR;
  }
  return 0;
}

cif_cost parse_cost(const std::string& s) { return s == "trace" ? CIF_COST_TRACE : CIF_COST_DET; }

int load(const std::string& path, ProblemPtr& out) {
  cif_problem* raw = nullptr;
  if (cif_status s = cif_problem_load(path.c_str(), &raw); s != CIF_OK) return report_error(s);
  out.reset(raw);
  return 0;
}

int load_result(const std::string& path, ResultPtr& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    return CIF_INPUT_ERROR;
  }
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  cif_result* raw = nullptr;
  if (cif_status s = cif_result_from_json(text.c_str(), &raw); s != CIF_OK) return report_error(s);
  out.reset(raw);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance Intersection fusion of two partial state estimates"};
  app.require_subcommand(1);

  std::string file;
  std::string cost = "det";
  std::string out;
  int grid = 101;
  int samples = 1000;
  std::uint64_t seed = 1;
  std::string result_path;

  auto add_cost = [&](CLI::App* sub) {
    sub->add_option("--cost", cost, "det or trace")->check(CLI::IsMember({"det", "trace"}));
  };

  CLI::App* fuse = app.add_subcommand("fuse", "Solve the CI problem and write the result as JSON");
  fuse->add_option("file", file, "problem JSON")->required();
  add_cost(fuse);
  fuse->add_option("--out", out, "output path (default stdout)");

  CLI::App* scan = app.add_subcommand("scan", "Tabulate the extended cost over an alpha grid");
  scan->add_option("file", file, "problem JSON")->required();
  add_cost(scan);
  scan->add_option("--grid", grid, "number of grid points (>= 2)");
  scan->add_option("--out", out, "CSV path (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "Certify conservativeness of the CI solution");
  verify->add_option("file", file, "problem JSON")->required();
  add_cost(verify);
  verify->add_option("--samples", samples, "adversarial and Monte Carlo samples");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--result", result_path, "verify this fuse output instead of re-solving");

  CLI::App* known = app.add_subcommand("known", "Optimal fusion with the file's known cross-covariance");
  known->add_option("file", file, "problem JSON with a truth block")->required();
  known->add_option("--out", out, "output path (default stdout)");

  int nodes = 5;
  int events = 20;
  int dim = 3;
  std::string topology = "ring";
  std::string preset = "random";
  CLI::App* sim = app.add_subcommand("sim", "Simulate pairwise fusion over a network");
  sim->add_option("--nodes", nodes, "number of nodes");
  sim->add_option("--topology", topology, "chain, ring or random")
      ->check(CLI::IsMember({"chain", "ring", "random"}));
  sim->add_option("--events", events, "number of fusion events");
  sim->add_option("--seed", seed, "random seed");
  add_cost(sim);
  sim->add_option("--dim", dim, "state dimension");
  sim->add_option("--preset", preset, "random, split, identity or collinear")
      ->check(CLI::IsMember({"random", "split", "identity", "collinear"}));
  sim->add_option("--out", out, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : CIF_INPUT_ERROR;
  }

  const cif_cost c = parse_cost(cost);
  char* text = nullptr;

  if (fuse->parsed()) {
    ProblemPtr problem;
    if (int rc = load(file, problem)) return rc;
    cif_result* raw = nullptr;
    if (cif_status s = cif_solve(problem.get(), c, &raw); s != CIF_OK) return report_error(s);
    ResultPtr result(raw);
    if (cif_status s = cif_result_to_json(result.get(), &text); s != CIF_OK) return report_error(s);
    StringPtr owned(text);
    return emit(owned.get(), out);
  }

  if (scan->parsed()) {
    ProblemPtr problem;
    if (int rc = load(file, problem)) return rc;
    if (cif_status s = cif_scan_csv(problem.get(), c, grid, &text); s != CIF_OK) return report_error(s);
    StringPtr owned(text);
    return emit(owned.get(), out);
  }

  if (verify->parsed()) {
    ProblemPtr problem;
    if (int rc = load(file, problem)) return rc;
    ResultPtr supplied;
    if (!result_path.empty()) {
      if (int rc = load_result(result_path, supplied)) return rc;
    }
    const cif_status s = cif_verify(problem.get(), c, samples, seed, supplied.get(), &text);
    if (text) {
      StringPtr owned(text);
      std::cout << owned.get();
    }
    if (s != CIF_OK) return report_error(s);
    return 0;
  }

  if (known->parsed()) {
    ProblemPtr problem;
    if (int rc = load(file, problem)) return rc;
    if (cif_status s = cif_known_json(problem.get(), &text); s != CIF_OK) return report_error(s);
    StringPtr owned(text);
    return emit(owned.get(), out);
  }

  if (sim->parsed()) {
    if (preset == "split" && sim->count("--dim") == 0) dim = 2;
    const cif_status s =
        cif_sim(dim, nodes, topology.c_str(), events, seed, c, preset.c_str(), &text);
    int rc = 0;
    if (text) {
      StringPtr owned(text);
      rc = emit(owned.get(), out);
    }
    if (s != CIF_OK) return report_error(s);
    return rc;
  }
  return CIF_INPUT_ERROR;
}
