#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cifuse/ci.hpp"

namespace cifuse {

struct NodeState {
  int id;
  Matrix H;        // p x n
  Vector x_hat;
  SymMatrix P_hat;
  std::vector<int> lineage;  // indices of fusion events that wrote this node
};

/// True state plus the exact joint covariance of all node errors, stacked in
/// node order. Hidden from the fusion rule; the harness uses it as ground truth.
struct GroundTruth {
  Vector x_true;
  SymMatrix joint;
  std::vector<Eigen::Index> offsets;  // start row of each node's error block
  Vector errors;                      // one realisation, propagated alongside

  SymMatrix block(int node, Eigen::Index p) const;
};

struct Network {
  Eigen::Index n;
  std::vector<NodeState> nodes;
  GroundTruth truth;
};

enum class Preset {
  Random,     // random H_i with p_i in [ceil(n/2), n], correlated errors
  Split,   // n = 2, nodes alternate H = [1 0] and [0 1], unit variances
  Identity,   // full-state nodes
  Collinear,  // every node observes the first coordinate only
};
const char* to_string(Preset p);
Preset preset_from_string(const std::string& s);

enum class Topology { Chain, Ring, Random };
const char* to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// Throws Unreachable when no pair of nodes jointly observes the full state.
Network init_network(Eigen::Index n, int nodes, std::uint64_t seed, Preset preset = Preset::Random);

struct FusionEvent {
  int a;  // overwritten with the fused estimate
  int b;  // sends its estimate, keeps its prior
  CostKind cost;
};

struct Schedule {
  std::vector<FusionEvent> events;
  Topology topology;
  std::uint64_t seed;
};

Schedule make_schedule(Topology topology, int nodes, int events, std::uint64_t seed,
                       CostKind cost);

struct EventRecord {
  int index;
  int a;
  int b;
  bool fused;            // false when the pair violated the rank condition
  std::string note;      // reason when skipped
  double alpha;
  double cost_value;
  std::string branch;
  double margin;         // lambda_min(P_hat - P_true)
  bool conservative;     // margin >= -1e-8 * scale
  bool cost_monotone;    // J(new P_hat) <= J(previous P_hat of node a) when both full-state
  bool cost_checked;
};

struct SimReport {
  std::vector<EventRecord> events;
  int fused = 0;
  int skipped = 0;
  int violations = 0;
  double min_margin = 0.0;

  /// One line per event, numbers with 17 significant digits.
  std::string to_text() const;
};

/// Runs the events in order, mutating the network and its ground truth.
SimReport run_schedule(Network& network, const Schedule& schedule);

inline constexpr double kSimTol = 1e-8;

}  // namespace cifuse
