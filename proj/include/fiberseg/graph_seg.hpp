#pragma once

#include <string>
#include <vector>

#include "fiberseg/ray_seg.hpp"

namespace fiberseg {

struct SmoothnessParams {
  int delta_ray = 2;    // max boundary-index shift between neighboring rays
  int delta_plane = 2;  // max shift between same-index rays of neighboring planes
};

struct CostParams {
  double lambda_weight = 1.0;
  double fa_avg = 0.5;  // bundle mean FA; terminal threshold T = fa_avg / 2
};

// Directed flow network over the evaluation lattice plus source/sink.
// Node ids: 0 = source, 1 = sink, 2 + (p*k + r)*m + j for lattice nodes.
struct FlowNetwork {
  struct Arc {
    int to;
    double capacity;  // residual capacity once flow has been pushed
    int rev;          // index of the paired arc in adjacency[to]
    bool forward;     // true for the arc as constructed, false for its residual twin
  };

  int n = 0, k = 0, m = 0;
  double d = 0.0;
  double inf_capacity = 0.0;
  std::vector<std::vector<Arc>> adjacency;

  static constexpr int kSource = 0;
  static constexpr int kSink = 1;
  int node_id(int p, int r, int j) const { return 2 + (p * k + r) * m + j; }
  int node_count() const { return 2 + n * k * m; }

  void add_arc(int from, int to, double capacity);
};

// Mean FA sampled at every vertex of every cropped fiber.
double bundle_mean_fa(const std::vector<Streamline>& fibers, const TensorVolume& vol);

// Column graph per the optimal-surface construction: INF arcs down each
// column and to depth j - delta on the four neighbor columns (ray neighbors
// wrap, plane neighbors do not); terminal capacities hinge on T = fa_avg/2.
FlowNetwork build_graph(const EvalGrid& grid, const SmoothnessParams& sp, const CostParams& cp);

struct MinCutResult {
  std::vector<uint8_t> source_set;  // per node id
  double flow_value = 0.0;
};

// Dinic max-flow; source_set is the residual-reachable side.
MinCutResult min_cut(FlowNetwork& g);

// Capacity of the cut induced by a source-side labeling (for duality checks).
double cut_capacity(const FlowNetwork& g, const std::vector<uint8_t>& source_set);

BoundaryField extract_boundary(const FlowNetwork& g, const std::vector<uint8_t>& source_set);

// DIMACS max-flow text dump for cross-checking with external solvers.
void save_dimacs(const FlowNetwork& g, const std::string& path);

}  // namespace fiberseg
