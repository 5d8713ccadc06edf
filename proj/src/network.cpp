#include "cifuse/network.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

#include "cifuse/random.hpp"

namespace cifuse {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SymMatrix GroundTruth::block(int node, Eigen::Index p) const {
  const Eigen::Index o = offsets.at(static_cast<std::size_t>(node));
  return SymMatrix(joint.mat().block(o, o, p, p));
}

const char* to_string(Preset p) {
  switch (p) {
    case Preset::Random: return "random";
    case Preset::Split: return "split";
    case Preset::Identity: return "identity";
    case Preset::Collinear: return "collinear";
  }
  return "unknown";
}

Preset preset_from_string(const std::string& s) {
  if (s == "random") return Preset::Random;
  if (s == "split") return Preset::Split;
  if (s == "identity") return Preset::Identity;
  if (s == "collinear") return Preset::Collinear;
  throw Error(ErrorCode::InvalidArgument, "unknown preset '" + s + "'");
}

const char* to_string(Topology t) {
  switch (t) {
    case Topology::Chain: return "chain";
    case Topology::Ring: return "ring";
    case Topology::Random: return "random";
  }
  return "unknown";
}

Topology topology_from_string(const std::string& s) {
  if (s == "chain") return Topology::Chain;
  if (s == "ring") return Topology::Ring;
  if (s == "random") return Topology::Random;
  throw Error(ErrorCode::InvalidArgument, "unknown topology '" + s + "'");
}

Network init_network(Eigen::Index n, int nodes, std::uint64_t seed, Preset preset) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "state dimension must be >= 1");
  if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "need at least two nodes");
  if (preset == Preset::Split && n != 2) {
    throw Error(ErrorCode::InvalidArgument, "split preset needs n = 2");
  }
  Rng rng = make_stream(seed, 0);

  std::vector<Matrix> hs;
  for (int i = 0; i < nodes; ++i) {
    switch (preset) {
      case Preset::Random: {
        const Eigen::Index lo = (n + 1) / 2;
        const Eigen::Index p =
            lo + static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n - lo + 1));
        hs.push_back(random_full_row_rank(rng, std::min(p, n), n));
        break;
      }
      case Preset::Split: {
        Matrix h = Matrix::Zero(1, 2);
        h(0, i % 2) = 1.0;
        hs.push_back(h);
        break;
      }
      case Preset::Identity:
        hs.push_back(Matrix::Identity(n, n));
        break;
      case Preset::Collinear: {
        Matrix h = Matrix::Zero(1, n);
        h(0, 0) = 1.0;
        hs.push_back(h);
        break;
      }
    }
  }

  bool reachable = false;
  for (int i = 0; i < nodes && !reachable; ++i) {
    for (int j = i + 1; j < nodes && !reachable; ++j) {
      Matrix stacked(hs[i].rows() + hs[j].rows(), n);
      stacked << hs[i], hs[j];
      reachable = numerical_rank(stacked) == n;
    }
  }
  if (!reachable) {
    throw Error(ErrorCode::Unreachable, "no pair of nodes observes the full state (rank n unreachable)");
  }

  std::vector<Eigen::Index> offsets;
  Eigen::Index total = 0;
  for (const Matrix& h : hs) {
    offsets.push_back(total);
    total += h.rows();
  }
  // Correlated errors across all nodes; condition number at most 100.
  SymMatrix joint = random_spd(rng, total, 0.1, 10.0);
  if (preset == Preset::Split) {
    const Vector d = joint.mat().diagonal().cwiseSqrt().cwiseInverse();
    joint = SymMatrix(d.asDiagonal() * joint.mat() * d.asDiagonal());
  }

  GroundTruth truth{gaussian_matrix(rng, n, 1).col(0), joint, offsets, Vector()};
  Eigen::LLT<Matrix> llt(joint.mat());
  truth.errors = llt.matrixL() * gaussian_matrix(rng, total, 1).col(0);

  Network net{n, {}, truth};
  for (int i = 0; i < nodes; ++i) {
    const Eigen::Index p = hs[i].rows();
    const SymMatrix p_true = truth.block(i, p);
    SymMatrix p_hat = p_true;
    if (preset != Preset::Split) {
      const Matrix g = gaussian_matrix(rng, p, p);
      const Matrix w = g * g.transpose();
      const double budget = 0.5 * p_true.mat().trace() * uniform01(rng);
      p_hat = SymMatrix(p_true.mat() + (budget / w.trace()) * w);
    }
    if (!loewner_geq(p_hat, p_true)) {
      throw Error(ErrorCode::InternalInconsistency, "initial covariance bound is not conservative");
    }
    const Vector x = hs[i] * truth.x_true + truth.errors.segment(offsets[i], p);
    net.nodes.push_back(NodeState{i, hs[i], x, p_hat, {}});
  }
  return net;
}

Schedule make_schedule(Topology topology, int nodes, int events, std::uint64_t seed,
                       CostKind cost) {
  if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "need at least two nodes");
  if (events < 0) throw Error(ErrorCode::InvalidArgument, "events must be >= 0");
  Schedule s{{}, topology, seed};
  Rng rng = make_stream(seed, 1);
  for (int k = 0; k < events; ++k) {
    int a = 0;
    int b = 0;
    switch (topology) {
      case Topology::Chain:
        b = k % (nodes - 1);
        a = b + 1;
        break;
      case Topology::Ring:
        b = k % nodes;
        a = (k + 1) % nodes;
        break;
      case Topology::Random:
        a = static_cast<int>(uniform01(rng) * nodes);
        b = static_cast<int>(uniform01(rng) * (nodes - 1));
        if (b >= a) ++b;
        break;
    }
    s.events.push_back(FusionEvent{a, b, cost});
  }
  return s;
}

SimReport run_schedule(Network& net, const Schedule& schedule) {
  SimReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const int count = static_cast<int>(net.nodes.size());
  for (std::size_t k = 0; k < schedule.events.size(); ++k) {
    const FusionEvent& ev = schedule.events[k];
    const int idx = static_cast<int>(k);
    if (ev.a < 0 || ev.b < 0 || ev.a >= count || ev.b >= count || ev.a == ev.b) {
      std::ostringstream os;
      os << "event " << idx << ": invalid node pair (" << ev.a << ", " << ev.b << ")";
      throw Error(ErrorCode::ScheduleError, os.str());
    }
    NodeState& na = net.nodes[static_cast<std::size_t>(ev.a)];
    const NodeState& nb = net.nodes[static_cast<std::size_t>(ev.b)];
    EventRecord rec{idx, ev.a, ev.b, false, "", 0.0, 0.0, "", 0.0, true, true, false};

    std::optional<FusionProblem> problem;
    try {
      problem.emplace(PartialEstimate{na.H, na.x_hat, na.P_hat},
                      PartialEstimate{nb.H, nb.x_hat, nb.P_hat});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AssumptionViolated) throw;
      rec.note = "skipped: rank condition fails for this pair";
      rep.events.push_back(rec);
      ++rep.skipped;
      continue;
    }
    const FusionResult r = solve_ci(*problem, ev.cost);

    // Linear map from old stacked errors to new ones: node a's block becomes
    // K1 e_a + K2 e_b, everything else is unchanged.
    const Eigen::Index pa = na.H.rows();
    const Eigen::Index pb = nb.H.rows();
    const Eigen::Index total = net.truth.joint.dim();
    const Eigen::Index new_total = total - pa + net.n;
    Matrix t = Matrix::Zero(new_total, total);
    std::vector<Eigen::Index> offsets;
    Eigen::Index row = 0;
    for (int i = 0; i < count; ++i) {
      const Eigen::Index old_off = net.truth.offsets[static_cast<std::size_t>(i)];
      offsets.push_back(row);
      if (i == ev.a) {
        t.block(row, old_off, net.n, pa) = r.K1;
        t.block(row, net.truth.offsets[static_cast<std::size_t>(ev.b)], net.n, pb) += r.K2;
        row += net.n;
      } else {
        const Eigen::Index p = net.nodes[static_cast<std::size_t>(i)].H.rows();
        t.block(row, old_off, p, p).setIdentity();
        row += p;
      }
    }
    const bool full_before = pa == net.n && na.H.isIdentity(0.0);
    const double old_cost = cost_of(na.P_hat, ev.cost);

    net.truth.joint = SymMatrix(t * net.truth.joint.mat() * t.transpose());
    net.truth.errors = t * net.truth.errors;
    net.truth.offsets = offsets;
    na.H = Matrix::Identity(net.n, net.n);
    na.x_hat = r.fused_x;
    na.P_hat = r.P_hat;
    na.lineage.push_back(idx);

    const SymMatrix p_true = net.truth.block(ev.a, net.n);
    const SymMatrix gap = r.P_hat - p_true;
    const double scale = std::max(1.0, r.P_hat.scale());
    rec.fused = true;
    rec.alpha = r.alpha;
    rec.cost_value = r.cost_value;
    rec.branch = to_string(r.diag.branch);
    rec.margin = eigenvalues(gap)(0);
    rec.conservative = rec.margin >= -kSimTol * scale;
    if (full_before) {
      rec.cost_checked = true;
      rec.cost_monotone = r.cost_value <= old_cost * (1.0 + 1e-9);
    }
    ++rep.fused;
    if (!rec.conservative) ++rep.violations;
    rep.min_margin = std::min(rep.min_margin, rec.margin);
    rep.events.push_back(rec);
  }
  if (rep.fused == 0) rep.min_margin = 0.0;
  return rep;
}

std::string SimReport::to_text() const {
  std::ostringstream os;
  for (const EventRecord& e : events) {
    os << "event=" << e.index << " a=" << e.a << " b=" << e.b;
    if (!e.fused) {
      os << " status=skipped reason=rank\n";
      continue;
    }
    os << " status=fused alpha=" << fmt17(e.alpha) << " cost=" << fmt17(e.cost_value)
       << " margin=" << fmt17(e.margin) << " branch=" << e.branch
       << " conservative=" << (e.conservative ? 1 : 0);
    if (e.cost_checked) os << " cost_monotone=" << (e.cost_monotone ? 1 : 0);
    os << "\n";
  }
  os << "summary fused=" << fused << " skipped=" << skipped << " violations=" << violations
     << " min_margin=" << fmt17(min_margin) << "\n";
  return os.str();
}

}  // namespace cifuse
