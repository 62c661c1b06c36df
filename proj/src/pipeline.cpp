#include "fiberseg/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "fiberseg/error.hpp"
#include "fiberseg/parallel.hpp"

namespace fiberseg {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

Vec3 vec_from(const json& a) { return {a.at(0), a.at(1), a.at(2)}; }

json vec_to(const Vec3& v) { return {v.x, v.y, v.z}; }

// Square region in the torus cross-section plane at arc angle theta_deg.
PlanarRegion torus_cross_section_region(double major_radius, double theta_deg, double half_width) {
  const double th = theta_deg * kPi / 180.0;
  PlanarRegion region;
  region.origin = {major_radius * std::cos(th), major_radius * std::sin(th), 0.0};
  region.normal = {-std::sin(th), std::cos(th), 0.0};
  region.basis_u = {std::cos(th), std::sin(th), 0.0};
  region.basis_v = {0.0, 0.0, 1.0};
  region.polygon = {{-half_width, -half_width},
                    {half_width, -half_width},
                    {half_width, half_width},
                    {-half_width, half_width}};
  return region;
}

GridGeometry geom_from(const json& j) {
  GridGeometry g;
  for (int i = 0; i < 3; ++i) g.dims[i] = j.at("dims").at(i).get<int>();
  g.spacing = vec_from(j.at("spacing"));
  g.origin = vec_from(j.at("origin"));
  return g;
}

json geom_to(const GridGeometry& g) {
  return {{"dims", {g.dims[0], g.dims[1], g.dims[2]}},
          {"spacing", vec_to(g.spacing)},
          {"origin", vec_to(g.origin)}};
}

PlanarRegion region_from(const json& j) {
  PlanarRegion region;
  region.origin = vec_from(j.at("origin"));
  region.normal = vec_from(j.at("normal"));
  region.basis_u = vec_from(j.at("basis_u"));
  region.basis_v = vec_from(j.at("basis_v"));
  for (const auto& p : j.at("polygon")) {
    region.polygon.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return region;
}

json region_to(const PlanarRegion& region) {
  json poly = json::array();
  for (const auto& p : region.polygon) poly.push_back({p[0], p[1]});
  return {{"origin", vec_to(region.origin)},
          {"normal", vec_to(region.normal)},
          {"basis_u", vec_to(region.basis_u)},
          {"basis_v", vec_to(region.basis_v)},
          {"polygon", poly}};
}

std::string artifact(const PipelineConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw FileError("missing input file: " + path);
}

BinaryMask load_ground_truth(const PipelineConfig& cfg) {
  if (cfg.phantom_kind == PipelineConfig::PhantomKind::File) {
    require_file(cfg.mask_path + ".json");
    return load_mask(cfg.mask_path);
  }
  require_file(artifact(cfg, "gt_mask.json"));
  return load_mask(artifact(cfg, "gt_mask"));
}

TensorVolume load_volume_artifact(const PipelineConfig& cfg) {
  if (cfg.phantom_kind == PipelineConfig::PhantomKind::File) {
    require_file(cfg.volume_path + ".json");
    return load_tensor_volume(cfg.volume_path);
  }
  require_file(artifact(cfg, "volume.json"));
  return load_tensor_volume(artifact(cfg, "volume"));
}

}  // namespace

PipelineConfig default_torus_config() {
  PipelineConfig cfg;
  cfg.config_id = "torus";
  cfg.phantom_kind = PipelineConfig::PhantomKind::Torus;
  cfg.torus.major_radius = 40.0;
  cfg.torus.tube_radius = 5.0;
  cfg.torus.arc_span = 90.0;
  cfg.torus.geom.dims = {57, 57, 17};
  cfg.torus.geom.spacing = {1.0, 1.0, 1.0};
  cfg.torus.geom.origin = {-8.0, -8.0, -8.0};
  cfg.torus.noise_sigma = 0.0;
  cfg.torus.rng_seed = 0;

  cfg.seed_region = torus_cross_section_region(40.0, 45.0, 4.0);
  cfg.include_a = torus_cross_section_region(40.0, 15.0, 6.5);
  cfg.include_b = torus_cross_section_region(40.0, 75.0, 6.5);
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }

  try {
    PipelineConfig cfg = default_torus_config();
    cfg.config_id = j.value("config_id", cfg.config_id);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);

    if (j.contains("phantom")) {
      const json& p = j.at("phantom");
      const std::string kind = p.value("type", "torus");
      if (kind == "torus") {
        cfg.phantom_kind = PipelineConfig::PhantomKind::Torus;
        TorusPhantomSpec& s = cfg.torus;
        s.major_radius = p.value("major_radius", s.major_radius);
        s.tube_radius = p.value("tube_radius", s.tube_radius);
        s.arc_span = p.value("arc_span", s.arc_span);
        if (p.contains("dims")) s.geom = geom_from(p);
        if (p.contains("inside_eigenvalues")) s.inside_eigenvalues = vec_from(p.at("inside_eigenvalues"));
        if (p.contains("outside_eigenvalues")) s.outside_eigenvalues = vec_from(p.at("outside_eigenvalues"));
        s.noise_sigma = p.value("noise_sigma", s.noise_sigma);
        s.rng_seed = p.value("rng_seed", s.rng_seed);
      } else if (kind == "curved_tube") {
        cfg.phantom_kind = PipelineConfig::PhantomKind::CurvedTube;
        CurvedTubePhantomSpec& s = cfg.curved_tube;
        for (const auto& cp : p.at("control_points")) s.control_points.push_back(vec_from(cp));
        s.tube_radius = p.value("tube_radius", s.tube_radius);
        s.geom = geom_from(p);
        if (p.contains("inside_eigenvalues")) s.inside_eigenvalues = vec_from(p.at("inside_eigenvalues"));
        if (p.contains("outside_eigenvalues")) s.outside_eigenvalues = vec_from(p.at("outside_eigenvalues"));
        s.noise_sigma = p.value("noise_sigma", s.noise_sigma);
        s.rng_seed = p.value("rng_seed", s.rng_seed);
      } else if (kind == "file") {
        cfg.phantom_kind = PipelineConfig::PhantomKind::File;
        cfg.volume_path = p.at("volume_path");
        cfg.mask_path = p.at("mask_path");
      } else {
        throw ConfigError("unknown phantom type: " + kind);
      }
    }

    if (j.contains("seed_region")) cfg.seed_region = region_from(j.at("seed_region"));
    if (j.contains("include_region_a")) cfg.include_a = region_from(j.at("include_region_a"));
    if (j.contains("include_region_b")) cfg.include_b = region_from(j.at("include_region_b"));

    if (j.contains("tracking")) {
      const json& t = j.at("tracking");
      cfg.tracking.step_size = t.value("step_size", cfg.tracking.step_size);
      cfg.tracking.fa_stop = t.value("fa_stop", cfg.tracking.fa_stop);
      cfg.tracking.angle_stop = t.value("angle_stop", cfg.tracking.angle_stop);
      cfg.tracking.max_steps = t.value("max_steps", cfg.tracking.max_steps);
      cfg.tracking.seed_density = t.value("seed_density", cfg.tracking.seed_density);
    }
    cfg.samples_per_fiber = j.value("samples_per_fiber", cfg.samples_per_fiber);

    if (j.contains("grid")) {
      const json& g = j.at("grid");
      cfg.grid.n = g.value("n", cfg.grid.n);
      cfg.grid.k = g.value("k", cfg.grid.k);
      cfg.grid.m = g.value("m", cfg.grid.m);
      cfg.grid.d = g.value("d", cfg.grid.d);
    }

    if (j.contains("ray")) {
      const json& r = j.at("ray");
      cfg.ray.thresholds.t_fa = r.value("t_fa", cfg.ray.thresholds.t_fa);
      cfg.ray.thresholds.t_alpha_c = r.value("t_alpha_c", cfg.ray.thresholds.t_alpha_c);
      cfg.ray.thresholds.t_alpha_n = r.value("t_alpha_n", cfg.ray.thresholds.t_alpha_n);
      if (r.contains("window")) cfg.ray.window_override = r.at("window").get<int>();
      cfg.ray.in_plane = r.value("in_plane_correction", cfg.ray.in_plane);
      cfg.ray.intra_plane = r.value("intra_plane_correction", cfg.ray.intra_plane);
      cfg.ray.max_ratio = r.value("max_ratio", cfg.ray.max_ratio);
    }

    if (j.contains("graph")) {
      const json& g = j.at("graph");
      cfg.graph.smoothness.delta_ray = g.value("delta_ray", cfg.graph.smoothness.delta_ray);
      cfg.graph.smoothness.delta_plane = g.value("delta_plane", cfg.graph.smoothness.delta_plane);
      cfg.graph.lambda_weight = g.value("lambda_weight", cfg.graph.lambda_weight);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError("invalid config " + path + ": " + e.what());
  }
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
  json j;
  j["config_id"] = cfg.config_id;
  j["output_dir"] = cfg.output_dir;
  if (cfg.phantom_kind == PipelineConfig::PhantomKind::Torus) {
    json p = geom_to(cfg.torus.geom);
    p["type"] = "torus";
    p["major_radius"] = cfg.torus.major_radius;
    p["tube_radius"] = cfg.torus.tube_radius;
    p["arc_span"] = cfg.torus.arc_span;
    p["inside_eigenvalues"] = vec_to(cfg.torus.inside_eigenvalues);
    p["outside_eigenvalues"] = vec_to(cfg.torus.outside_eigenvalues);
    p["noise_sigma"] = cfg.torus.noise_sigma;
    p["rng_seed"] = cfg.torus.rng_seed;
    j["phantom"] = p;
  } else if (cfg.phantom_kind == PipelineConfig::PhantomKind::CurvedTube) {
    json p = geom_to(cfg.curved_tube.geom);
    p["type"] = "curved_tube";
    json cps = json::array();
    for (const auto& cp : cfg.curved_tube.control_points) cps.push_back(vec_to(cp));
    p["control_points"] = cps;
    p["tube_radius"] = cfg.curved_tube.tube_radius;
    p["inside_eigenvalues"] = vec_to(cfg.curved_tube.inside_eigenvalues);
    p["outside_eigenvalues"] = vec_to(cfg.curved_tube.outside_eigenvalues);
    p["noise_sigma"] = cfg.curved_tube.noise_sigma;
    p["rng_seed"] = cfg.curved_tube.rng_seed;
    j["phantom"] = p;
  } else {
    j["phantom"] = {{"type", "file"}, {"volume_path", cfg.volume_path},
                    {"mask_path", cfg.mask_path}};
  }
  j["seed_region"] = region_to(cfg.seed_region);
  j["include_region_a"] = region_to(cfg.include_a);
  j["include_region_b"] = region_to(cfg.include_b);
  j["tracking"] = {{"step_size", cfg.tracking.step_size},
                   {"fa_stop", cfg.tracking.fa_stop},
                   {"angle_stop", cfg.tracking.angle_stop},
                   {"max_steps", cfg.tracking.max_steps},
                   {"seed_density", cfg.tracking.seed_density}};
  j["samples_per_fiber"] = cfg.samples_per_fiber;
  j["grid"] = {{"n", cfg.grid.n}, {"k", cfg.grid.k}, {"m", cfg.grid.m}, {"d", cfg.grid.d}};
  j["ray"] = {{"t_fa", cfg.ray.thresholds.t_fa},
              {"t_alpha_c", cfg.ray.thresholds.t_alpha_c},
              {"t_alpha_n", cfg.ray.thresholds.t_alpha_n},
              {"in_plane_correction", cfg.ray.in_plane},
              {"intra_plane_correction", cfg.ray.intra_plane},
              {"max_ratio", cfg.ray.max_ratio}};
  if (cfg.ray.window_override) j["ray"]["window"] = *cfg.ray.window_override;
  j["graph"] = {{"delta_ray", cfg.graph.smoothness.delta_ray},
                {"delta_plane", cfg.graph.smoothness.delta_plane},
                {"lambda_weight", cfg.graph.lambda_weight}};
  std::ofstream out(path);
  if (!out) throw FileError("cannot write " + path);
  out << j.dump(2) << "\n";
}

TrackResult track_bundle(const TensorVolume& vol, const PipelineConfig& cfg) {
  const auto seeds = seed_points(cfg.seed_region, cfg.tracking.seed_density);
  std::vector<Streamline> raw(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    raw[i] = track_fiber(vol, seeds[i], cfg.tracking);
  });
  std::vector<Streamline> tracked;
  for (auto& f : raw) {
    if (f.points.size() >= 2) tracked.push_back(std::move(f));
  }
  const auto cropped = restrict_and_crop(tracked, cfg.include_a, cfg.include_b);
  const Centerline center = compute_centerline(cropped, cfg.samples_per_fiber);
  const Centerline samples = sample_centerline(center, cfg.grid.n);
  TrackResult result;
  result.fibers = cropped;
  result.frames = build_frames(samples);
  return result;
}

BoundaryField segment_ray_method(const EvalGrid& grid, const Vec3& voxel_spacing,
                                 const PipelineConfig& cfg) {
  RayThresholds th = cfg.ray.thresholds;
  th.r = cfg.ray.window_override ? *cfg.ray.window_override
                                 : window_size(voxel_spacing, cfg.grid.d);
  BoundaryField b = detect_boundary(grid, th);
  if (cfg.ray.in_plane) b = in_plane_correction(b, cfg.ray.max_ratio);
  if (cfg.ray.intra_plane) b = intra_plane_correction(b, cfg.ray.max_ratio);
  return b;
}

BoundaryField segment_graph_method(const EvalGrid& grid, double fa_avg,
                                   const PipelineConfig& cfg) {
  CostParams cp;
  cp.lambda_weight = cfg.graph.lambda_weight;
  cp.fa_avg = fa_avg;
  FlowNetwork net = build_graph(grid, cfg.graph.smoothness, cp);
  const MinCutResult cut = min_cut(net);
  return extract_boundary(net, cut.source_set);
}

TriangleMesh mesh_from_boundary(const BoundaryField& b, const std::vector<PlaneFrame>& frames) {
  const auto points = boundary_points(b, frames);
  const auto crossings = detect_contour_crossings(points, b.n, b.k);
  for (int p : crossings) {
    std::cerr << "warning: contour crossing between planes " << p << " and " << p + 1 << "\n";
  }
  const TriangleMesh tube = triangulate(points, b.n, b.k);
  return cap_ends(tube, b.n, b.k, frames.front().origin, frames.back().origin);
}

double evaluate_boundary(const BoundaryField& b, const std::vector<PlaneFrame>& frames,
                         const BinaryMask& ground_truth) {
  const BinaryMask seg = voxelize(b, frames, ground_truth.geom);
  const BinaryMask gt = crop_mask_between_planes(ground_truth, frames.front(), frames.back());
  return dsc(seg, gt);
}

void stage_phantom(const PipelineConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  if (cfg.phantom_kind == PipelineConfig::PhantomKind::File) {
    require_file(cfg.volume_path + ".json");
    require_file(cfg.mask_path + ".json");
    return;  // nothing to generate
  }
  auto [vol, mask] = cfg.phantom_kind == PipelineConfig::PhantomKind::Torus
                         ? generate_torus_phantom(cfg.torus)
                         : generate_curved_tube_phantom(cfg.curved_tube);
  save_tensor_volume(vol, artifact(cfg, "volume"));
  save_mask(mask, artifact(cfg, "gt_mask"));
}

void stage_track(const PipelineConfig& cfg) {
  const TensorVolume vol = load_volume_artifact(cfg);
  const TrackResult result = track_bundle(vol, cfg);
  save_streamlines(result.fibers, artifact(cfg, "fibers.json"));
  save_frames(result.frames, artifact(cfg, "frames.json"));
}

void stage_segment(const PipelineConfig& cfg, const std::string& method) {
  const TensorVolume vol = load_volume_artifact(cfg);
  require_file(artifact(cfg, "frames.json"));
  const auto frames = load_frames(artifact(cfg, "frames.json"));
  const EvalGrid grid = build_grid(vol, frames, cfg.grid);

  BoundaryField b;
  if (method == "ray") {
    b = segment_ray_method(grid, vol.geom.spacing, cfg);
  } else if (method == "graph") {
    require_file(artifact(cfg, "fibers.json"));
    const auto fibers = load_streamlines(artifact(cfg, "fibers.json"));
    b = segment_graph_method(grid, bundle_mean_fa(fibers, vol), cfg);
  } else {
    throw ConfigError("unknown segmentation method: " + method);
  }
  save_boundary_field(b, artifact(cfg, "boundary_" + method + ".json"));
}

void stage_mesh(const PipelineConfig& cfg, const std::string& method) {
  require_file(artifact(cfg, "boundary_" + method + ".json"));
  require_file(artifact(cfg, "frames.json"));
  const auto b = load_boundary_field(artifact(cfg, "boundary_" + method + ".json"));
  const auto frames = load_frames(artifact(cfg, "frames.json"));
  const TriangleMesh mesh = mesh_from_boundary(b, frames);
  export_mesh(mesh, artifact(cfg, "mesh_" + method + ".obj"), MeshFormat::OBJ);
  export_mesh(mesh, artifact(cfg, "mesh_" + method + ".stl"), MeshFormat::STL);
}

void stage_evaluate(const PipelineConfig& cfg) {
  const BinaryMask gt = load_ground_truth(cfg);
  require_file(artifact(cfg, "frames.json"));
  const auto frames = load_frames(artifact(cfg, "frames.json"));

  std::vector<RunRecord> records;
  for (const std::string method : {"ray", "graph"}) {
    const std::string path = artifact(cfg, "boundary_" + method + ".json");
    if (!std::filesystem::exists(path)) continue;
    const auto b = load_boundary_field(path);
    const BinaryMask seg = voxelize(b, frames, gt.geom);
    save_mask(seg, artifact(cfg, "mask_" + method));
    const BinaryMask gt_cut = crop_mask_between_planes(gt, frames.front(), frames.back());
    records.push_back({cfg.config_id, method, dsc(seg, gt_cut)});
  }
  if (records.empty()) throw EmptyReportError("evaluate: no boundary fields found");
  const EvalReport report = aggregate(records);
  save_report_json(report, artifact(cfg, "report.json"));
  save_report_table(report, artifact(cfg, "report.txt"));
}

void run_pipeline(const PipelineConfig& cfg) {
  stage_phantom(cfg);
  stage_track(cfg);
  stage_segment(cfg, "ray");
  stage_segment(cfg, "graph");
  stage_mesh(cfg, "ray");
  stage_mesh(cfg, "graph");
  stage_evaluate(cfg);
}

}  // namespace fiberseg
