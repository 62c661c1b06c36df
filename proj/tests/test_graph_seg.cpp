#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fiberseg/error.hpp"
#include "fiberseg/graph_seg.hpp"

using namespace fiberseg;

namespace {

EvalGrid make_grid(int n, int k, int m, double d = 0.5) {
  EvalGrid grid;
  grid.params = {n, k, m, d};
  grid.points.assign(static_cast<std::size_t>(n) * k * m, EvalPoint{});
  for (auto& pt : grid.points) {
    pt.in_bounds = true;
    pt.fa = 1.0;
  }
  return grid;
}

struct ColumnCosts {
  // cost of choosing boundary index b for this column: excluded s-caps plus
  // included t-caps
  std::vector<double> cost;  // size m+1
};

// Exhaustive minimum over all smoothness-feasible boundary assignments.
// Column A with b_A >= 1 has an INF arc from its top node (j = b_A - 1) to
// (neighbor, max(0, b_A - 1 - delta)), so b_nb >= max(0, b_A - 1 - delta) + 1.
double oracle_min_cost(const EvalGrid& grid, const SmoothnessParams& sp, const CostParams& cp,
                       std::vector<int>* best_out = nullptr) {
  const int n = grid.params.n, k = grid.params.k, m = grid.params.m;
  const int cols = n * k;
  const double T = cp.fa_avg / 2.0;

  std::vector<ColumnCosts> cc(cols);
  for (int p = 0; p < n; ++p) {
    for (int r = 0; r < k; ++r) {
      auto& c = cc[p * k + r].cost;
      c.assign(m + 1, 0.0);
      for (int b = 0; b <= m; ++b) {
        for (int j = 0; j < m; ++j) {
          const double f = grid.at(p, r, j).fa;
          if (j >= b) c[b] += cp.lambda_weight * std::max(0.0, f - T);
          else c[b] += cp.lambda_weight * std::max(0.0, T - f);
        }
      }
    }
  }

  // Directed neighbor pairs (a -> b) with their delta.
  std::vector<std::array<int, 3>> pairs;
  for (int p = 0; p < n; ++p) {
    for (int r = 0; r < k; ++r) {
      const int a = p * k + r;
      for (int dr : {-1, 1}) {
        const int rn = ((r + dr) % k + k) % k;
        pairs.push_back({a, p * k + rn, sp.delta_ray});
      }
      for (int dp : {-1, 1}) {
        const int pn = p + dp;
        if (pn >= 0 && pn < n) pairs.push_back({a, pn * k + r, sp.delta_plane});
      }
    }
  }

  std::vector<int> b(cols, 0), best;
  double best_cost = std::numeric_limits<double>::infinity();
  while (true) {
    bool feasible = true;
    for (const auto& pr : pairs) {
      if (b[pr[0]] >= 1 && b[pr[1]] < std::max(0, b[pr[0]] - 1 - pr[2]) + 1) {
        feasible = false;
        break;
      }
    }
    if (feasible) {
      double cost = 0.0;
      for (int c = 0; c < cols; ++c) cost += cc[c].cost[b[c]];
      if (cost < best_cost) {
        best_cost = cost;
        best = b;
      }
    }
    int c = 0;
    while (c < cols && b[c] == m) b[c++] = 0;
    if (c == cols) break;
    ++b[c];
  }
  if (best_out) *best_out = best;
  return best_cost;
}

std::vector<int> boundary_indices(const BoundaryField& b) {
  std::vector<int> out(b.radius.size());
  for (std::size_t i = 0; i < b.radius.size(); ++i) {
    out[i] = static_cast<int>(std::lround(b.radius[i] / b.d));
  }
  return out;
}

}  // namespace

TEST_CASE("build_graph: node and INF-arc counts for n=1, k=3, m=2") {
  const EvalGrid grid = make_grid(1, 3, 2);
  FlowNetwork g = build_graph(grid, {0, 0}, {1.0, 0.5});
  CHECK(g.node_count() == 8);

  int inf_arcs = 0, s_arcs = 0, t_arcs = 0;
  for (int u = 0; u < g.node_count(); ++u) {
    for (const auto& arc : g.adjacency[u]) {
      if (!arc.forward) continue;
      if (arc.capacity == g.inf_capacity) ++inf_arcs;
      else if (u == FlowNetwork::kSource) ++s_arcs;
      else if (arc.to == FlowNetwork::kSink) ++t_arcs;
    }
  }
  // 3 intra-column (j=1 -> j=0) + 2 wrap ray-neighbor arcs per node * 6 nodes
  CHECK(inf_arcs == 3 + 12);
  CHECK(s_arcs == 6);  // all fa = 1.0 > T
  CHECK(t_arcs == 0);
}

TEST_CASE("build_graph: terminal capacities hinge at T = fa_avg/2") {
  EvalGrid grid = make_grid(1, 3, 1);
  grid.points[grid.index(0, 0, 0)].fa = 0.6;  // = fa_avg -> s-cap fa_avg/2
  grid.points[grid.index(0, 1, 0)].fa = 0.0;  // -> t-cap fa_avg/2
  grid.points[grid.index(0, 2, 0)].fa = 0.3;  // = T -> neither
  FlowNetwork g = build_graph(grid, {1, 1}, {1.0, 0.6});

  double s_cap_node0 = -1.0;
  for (const auto& arc : g.adjacency[FlowNetwork::kSource]) {
    if (arc.forward && arc.to == g.node_id(0, 0, 0)) s_cap_node0 = arc.capacity;
    CHECK(arc.to != g.node_id(0, 2, 0));  // no terminal arc at f = T
  }
  CHECK(s_cap_node0 == doctest::Approx(0.3));

  double t_cap_node1 = -1.0;
  for (const auto& arc : g.adjacency[g.node_id(0, 1, 0)]) {
    if (arc.forward && arc.to == FlowNetwork::kSink) t_cap_node1 = arc.capacity;
  }
  CHECK(t_cap_node1 == doctest::Approx(0.3));
}

TEST_CASE("build_graph: rejects bad parameters") {
  const EvalGrid grid = make_grid(1, 3, 2);
  CHECK_THROWS_AS(build_graph(make_grid(1, 2, 2), {1, 1}, {1.0, 0.5}), InvalidParameterError);
  CHECK_THROWS_AS(build_graph(grid, {-1, 1}, {1.0, 0.5}), InvalidParameterError);
  CHECK_THROWS_AS(build_graph(grid, {1, 1}, {0.0, 0.5}), InvalidParameterError);
  CHECK_THROWS_AS(build_graph(grid, {1, 1}, {1.0, 0.0}), InvalidParameterError);
}

TEST_CASE("min_cut: matches exhaustive oracle on randomized small grids") {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> ufa(0, 64);  // fa on a 1/64 lattice => exact arithmetic
  std::uniform_int_distribution<int> udelta(0, 2);
  const std::array<std::array<int, 2>, 4> shapes = {{{1, 3}, {2, 3}, {1, 4}, {1, 6}}};
  std::uniform_int_distribution<int> ushape(0, 3);
  std::uniform_int_distribution<int> um(1, 4);

  for (int trial = 0; trial < 200; ++trial) {
    const auto [n, k] = shapes[ushape(rng)];
    const int m = um(rng);
    EvalGrid grid = make_grid(n, k, m);
    for (auto& pt : grid.points) pt.fa = ufa(rng) / 64.0;
    const SmoothnessParams sp{udelta(rng), udelta(rng)};
    const CostParams cp{1.0, 1.0};  // T = 0.5, also on the 1/64 lattice

    FlowNetwork g = build_graph(grid, sp, cp);
    const MinCutResult cut = min_cut(g);
    const double cap = cut_capacity(g, cut.source_set);
    const double oracle = oracle_min_cost(grid, sp, cp);

    CHECK(cut.flow_value == doctest::Approx(cap).epsilon(1e-12));
    CHECK(cut.flow_value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(cap < g.inf_capacity);  // no INF arc crosses the cut

    const BoundaryField b = extract_boundary(g, cut.source_set);  // throws if non-prefix
    const std::vector<int> idx = boundary_indices(b);
    // extracted assignment achieves the optimum
    double assigned_cost = 0.0;
    const double T = cp.fa_avg / 2.0;
    for (int p = 0; p < n; ++p) {
      for (int r = 0; r < k; ++r) {
        for (int j = 0; j < m; ++j) {
          const double f = grid.at(p, r, j).fa;
          if (j >= idx[p * k + r]) assigned_cost += std::max(0.0, f - T);
          else assigned_cost += std::max(0.0, T - f);
        }
      }
    }
    CHECK(assigned_cost == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("min_cut: smoothness deltas bound neighbor boundary differences") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> ufa(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    EvalGrid grid = make_grid(2, 5, 6);
    for (auto& pt : grid.points) pt.fa = ufa(rng);
    FlowNetwork g = build_graph(grid, {1, 1}, {1.0, 1.0});
    const MinCutResult cut = min_cut(g);
    const BoundaryField b = extract_boundary(g, cut.source_set);
    const std::vector<int> idx = boundary_indices(b);
    const int k = 5;
    for (int p = 0; p < 2; ++p) {
      for (int r = 0; r < k; ++r) {
        const int ba = idx[p * k + r];
        if (ba < 1) continue;
        for (int dr : {-1, 1}) {
          const int bn = idx[p * k + ((r + dr) % k + k) % k];
          CHECK(bn >= std::max(0, ba - 1 - 1) + 1);
        }
        const int pn = 1 - p;
        CHECK(idx[pn * k + r] >= std::max(0, ba - 1 - 1) + 1);
      }
    }
  }
}

TEST_CASE("min_cut: scaling lambda scales the flow and keeps the cut") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ufa(0.0, 1.0);
  EvalGrid grid = make_grid(1, 6, 4);
  for (auto& pt : grid.points) pt.fa = ufa(rng);

  FlowNetwork g1 = build_graph(grid, {1, 1}, {1.0, 0.8});
  FlowNetwork g2 = build_graph(grid, {1, 1}, {2.0, 0.8});
  const MinCutResult c1 = min_cut(g1);
  const MinCutResult c2 = min_cut(g2);
  CHECK(c2.flow_value == doctest::Approx(2.0 * c1.flow_value).epsilon(1e-12));
  CHECK(c1.source_set == c2.source_set);
}

TEST_CASE("extract_boundary: saturation flag and zero columns") {
  // Strong s-caps everywhere: everything ends up source side -> saturated.
  EvalGrid grid = make_grid(1, 3, 3);
  FlowNetwork g = build_graph(grid, {0, 0}, {1.0, 0.5});
  const MinCutResult cut = min_cut(g);
  const BoundaryField b = extract_boundary(g, cut.source_set);
  for (int r = 0; r < 3; ++r) {
    CHECK(b.at(0, r) == doctest::Approx(3 * 0.5));
    CHECK(b.saturated[r] == 1);
  }

  // All background: empty source side, radius 0 everywhere.
  EvalGrid bg = make_grid(1, 3, 3);
  for (auto& pt : bg.points) pt.fa = 0.0;
  FlowNetwork g2 = build_graph(bg, {0, 0}, {1.0, 0.5});
  const MinCutResult cut2 = min_cut(g2);
  const BoundaryField b2 = extract_boundary(g2, cut2.source_set);
  for (int r = 0; r < 3; ++r) {
    CHECK(b2.at(0, r) == 0.0);
    CHECK(b2.saturated[r] == 0);
  }
}

TEST_CASE("extract_boundary: non-prefix membership raises") {
  const EvalGrid grid = make_grid(1, 3, 3);
  FlowNetwork g = build_graph(grid, {0, 0}, {1.0, 0.5});
  std::vector<uint8_t> bogus(g.node_count(), 0);
  bogus[FlowNetwork::kSource] = 1;
  bogus[g.node_id(0, 0, 2)] = 1;  // j=2 in without j=0,1
  CHECK_THROWS_AS(extract_boundary(g, bogus), InternalConsistencyError);
}
