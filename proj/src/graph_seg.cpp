#include "fiberseg/graph_seg.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>

#include "fiberseg/error.hpp"

namespace fiberseg {

void FlowNetwork::add_arc(int from, int to, double capacity) {
  adjacency[from].push_back({to, capacity, static_cast<int>(adjacency[to].size()), true});
  adjacency[to].push_back({from, 0.0, static_cast<int>(adjacency[from].size()) - 1, false});
}

double bundle_mean_fa(const std::vector<Streamline>& fibers, const TensorVolume& vol) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& fiber : fibers) {
    for (const auto& p : fiber.points) {
      if (const auto t = try_sample_tensor(vol, p)) {
        sum += fractional_anisotropy(*t);
        ++count;
      }
    }
  }
  if (count == 0) throw EmptyBundleError("bundle_mean_fa: no in-bounds fiber points");
  return sum / static_cast<double>(count);
}

FlowNetwork build_graph(const EvalGrid& grid, const SmoothnessParams& sp, const CostParams& cp) {
  const GridParams& gp = grid.params;
  if (gp.k < 3) throw InvalidParameterError("build_graph: need k >= 3");
  if (sp.delta_ray < 0 || sp.delta_plane < 0) {
    throw InvalidParameterError("build_graph: smoothness deltas must be >= 0");
  }
  if (!(cp.fa_avg > 0.0) || !(cp.lambda_weight > 0.0)) {
    throw InvalidParameterError("build_graph: fa_avg and lambda_weight must be > 0");
  }

  FlowNetwork g;
  g.n = gp.n;
  g.k = gp.k;
  g.m = gp.m;
  g.d = gp.d;
  g.adjacency.resize(g.node_count());

  const double threshold = cp.fa_avg / 2.0;
  double finite_sum = 0.0;
  for (const auto& pt : grid.points) {
    finite_sum += cp.lambda_weight * std::abs(pt.fa - threshold);
  }
  g.inf_capacity = 1.0 + finite_sum;

  for (int p = 0; p < gp.n; ++p) {
    for (int r = 0; r < gp.k; ++r) {
      for (int j = 0; j < gp.m; ++j) {
        const int node = g.node_id(p, r, j);
        if (j >= 1) g.add_arc(node, g.node_id(p, r, j - 1), g.inf_capacity);
        for (int dr : {-1, 1}) {
          const int rn = ((r + dr) % gp.k + gp.k) % gp.k;
          g.add_arc(node, g.node_id(p, rn, std::max(0, j - sp.delta_ray)), g.inf_capacity);
        }
        for (int dp : {-1, 1}) {
          const int pn = p + dp;
          if (pn < 0 || pn >= gp.n) continue;
          g.add_arc(node, g.node_id(pn, r, std::max(0, j - sp.delta_plane)), g.inf_capacity);
        }
        const double f = grid.at(p, r, j).fa;
        if (f > threshold) {
          g.add_arc(FlowNetwork::kSource, node, cp.lambda_weight * (f - threshold));
        } else if (f < threshold) {
          g.add_arc(node, FlowNetwork::kSink, cp.lambda_weight * (threshold - f));
        }
      }
    }
  }
  return g;
}

namespace {

// Dinic: BFS level graph + DFS blocking flow.
struct DinicState {
  FlowNetwork& g;
  std::vector<int> level;
  std::vector<std::size_t> iter;

  explicit DinicState(FlowNetwork& net)
      : g(net), level(net.node_count()), iter(net.node_count()) {}

  bool bfs() {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[FlowNetwork::kSource] = 0;
    q.push(FlowNetwork::kSource);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& arc : g.adjacency[u]) {
        if (arc.capacity > 0.0 && level[arc.to] < 0) {
          level[arc.to] = level[u] + 1;
          q.push(arc.to);
        }
      }
    }
    return level[FlowNetwork::kSink] >= 0;
  }

  double dfs(int u, double pushed) {
    if (u == FlowNetwork::kSink) return pushed;
    for (std::size_t& i = iter[u]; i < g.adjacency[u].size(); ++i) {
      auto& arc = g.adjacency[u][i];
      if (arc.capacity <= 0.0 || level[arc.to] != level[u] + 1) continue;
      const double got = dfs(arc.to, std::min(pushed, arc.capacity));
      if (got > 0.0) {
        arc.capacity -= got;
        g.adjacency[arc.to][arc.rev].capacity += got;
        return got;
      }
    }
    return 0.0;
  }
};

}  // namespace

MinCutResult min_cut(FlowNetwork& g) {
  DinicState dinic(g);
  double flow = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  while (dinic.bfs()) {
    std::fill(dinic.iter.begin(), dinic.iter.end(), 0);
    for (double pushed = dinic.dfs(FlowNetwork::kSource, inf); pushed > 0.0;
         pushed = dinic.dfs(FlowNetwork::kSource, inf)) {
      flow += pushed;
    }
  }

  MinCutResult result;
  result.flow_value = flow;
  result.source_set.assign(g.node_count(), 0);
  std::queue<int> q;
  result.source_set[FlowNetwork::kSource] = 1;
  q.push(FlowNetwork::kSource);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& arc : g.adjacency[u]) {
      if (arc.capacity > 0.0 && !result.source_set[arc.to]) {
        result.source_set[arc.to] = 1;
        q.push(arc.to);
      }
    }
  }
  return result;
}

double cut_capacity(const FlowNetwork& g, const std::vector<uint8_t>& source_set) {
  // Original capacity of a forward arc = residual + what was pushed (stored
  // as the twin's residual gain).
  double total = 0.0;
  for (int u = 0; u < g.node_count(); ++u) {
    if (!source_set[u]) continue;
    for (const auto& arc : g.adjacency[u]) {
      if (!arc.forward || source_set[arc.to]) continue;
      total += arc.capacity + g.adjacency[arc.to][arc.rev].capacity;
    }
  }
  return total;
}

BoundaryField extract_boundary(const FlowNetwork& g, const std::vector<uint8_t>& source_set) {
  BoundaryField b;
  b.n = g.n;
  b.k = g.k;
  b.d = g.d;
  b.provenance = "graph";
  b.radius.assign(static_cast<std::size_t>(g.n) * g.k, 0.0);
  b.saturated.assign(b.radius.size(), 0);
  for (int p = 0; p < g.n; ++p) {
    for (int r = 0; r < g.k; ++r) {
      int top = -1;
      for (int j = 0; j < g.m; ++j) {
        if (source_set[g.node_id(p, r, j)]) {
          if (j != top + 1) {
            throw InternalConsistencyError("extract_boundary: column membership not a prefix");
          }
          top = j;
        }
      }
      b.at(p, r) = (top + 1) * g.d;
      if (top + 1 == g.m) b.saturated[static_cast<std::size_t>(p) * g.k + r] = 1;
    }
  }
  return b;
}

void save_dimacs(const FlowNetwork& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot write " + path);
  std::size_t arc_count = 0;
  for (const auto& arcs : g.adjacency) {
    for (const auto& arc : arcs) {
      if (arc.forward) ++arc_count;
    }
  }
  out << "p max " << g.node_count() << " " << arc_count << "\n";
  out << "n " << FlowNetwork::kSource + 1 << " s\n";
  out << "n " << FlowNetwork::kSink + 1 << " t\n";
  for (int u = 0; u < g.node_count(); ++u) {
    for (const auto& arc : g.adjacency[u]) {
      if (!arc.forward) continue;
      const double original = arc.capacity + g.adjacency[arc.to][arc.rev].capacity;
      out << "a " << u + 1 << " " << arc.to + 1 << " " << original << "\n";
    }
  }
}

}  // namespace fiberseg
