#pragma once

#include <optional>
#include <string>

#include "fiberseg/eval.hpp"
#include "fiberseg/graph_seg.hpp"
#include "fiberseg/mesh.hpp"
#include "fiberseg/phantom.hpp"

namespace fiberseg {

struct RayConfig {
  RayThresholds thresholds;        // thresholds.r is derived from window_size
                                   // unless overridden in the config
  std::optional<int> window_override;
  bool in_plane = true;
  bool intra_plane = true;
  double max_ratio = 1.5;
};

struct GraphConfig {
  SmoothnessParams smoothness;
  double lambda_weight = 1.0;
};

struct PipelineConfig {
  std::string config_id = "default";

  // Either a generated phantom or a pre-existing volume/mask pair.
  enum class PhantomKind { Torus, CurvedTube, File } phantom_kind = PhantomKind::Torus;
  TorusPhantomSpec torus;
  CurvedTubePhantomSpec curved_tube;
  std::string volume_path;  // stem, PhantomKind::File only
  std::string mask_path;

  PlanarRegion seed_region;
  PlanarRegion include_a;
  PlanarRegion include_b;

  TrackingParams tracking;
  int samples_per_fiber = 50;
  GridParams grid;
  RayConfig ray;
  GraphConfig graph;
  std::string output_dir = "out";
};

// Shipped defaults: the noiseless 90-degree torus experiment.
PipelineConfig default_torus_config();

PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& cfg, const std::string& path);

// File-based stages; each one reads only artifacts written by its
// predecessors into cfg.output_dir.
void stage_phantom(const PipelineConfig& cfg);
void stage_track(const PipelineConfig& cfg);
void stage_segment(const PipelineConfig& cfg, const std::string& method);
void stage_mesh(const PipelineConfig& cfg, const std::string& method);
void stage_evaluate(const PipelineConfig& cfg);
void run_pipeline(const PipelineConfig& cfg);

// In-memory helpers shared by the stages and the acceptance suite.
struct TrackResult {
  std::vector<Streamline> fibers;  // cropped, oriented a -> b
  std::vector<PlaneFrame> frames;
};

TrackResult track_bundle(const TensorVolume& vol, const PipelineConfig& cfg);
BoundaryField segment_ray_method(const EvalGrid& grid, const Vec3& voxel_spacing,
                                 const PipelineConfig& cfg);
BoundaryField segment_graph_method(const EvalGrid& grid, double fa_avg,
                                   const PipelineConfig& cfg);
TriangleMesh mesh_from_boundary(const BoundaryField& b, const std::vector<PlaneFrame>& frames);
double evaluate_boundary(const BoundaryField& b, const std::vector<PlaneFrame>& frames,
                         const BinaryMask& ground_truth);

}  // namespace fiberseg
