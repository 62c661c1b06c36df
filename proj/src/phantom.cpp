#include "fiberseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiberseg/error.hpp"
#include "fiberseg/parallel.hpp"

namespace fiberseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based per-voxel gaussian stream: independent of voxel visit order,
// so parallel generation is bit-identical to serial.
struct VoxelRng {
  uint64_t state;
  VoxelRng(uint64_t seed, int ix, int iy, int iz) {
    state = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    state = splitmix64(state ^ static_cast<uint64_t>(ix));
    state = splitmix64(state ^ static_cast<uint64_t>(iy));
    state = splitmix64(state ^ static_cast<uint64_t>(iz));
  }
  double uniform() {  // in (0,1]
    state = splitmix64(state);
    return (static_cast<double>(state >> 11) + 1.0) * 0x1.0p-53;
  }
  double gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
};

DiffusionTensor tensor_from_basis(const Vec3& e1, const Vec3& e2, const Vec3& e3,
                                  const Vec3& lambdas) {
  EigenSystem es;
  es.lambda1 = lambdas.x;
  es.lambda2 = lambdas.y;
  es.lambda3 = lambdas.z;
  es.e1 = e1;
  es.e2 = e2;
  es.e3 = e3;
  return from_eigensystem(es);
}

DiffusionTensor apply_noise_and_floor(const DiffusionTensor& clean, double sigma_abs,
                                      VoxelRng& rng) {
  DiffusionTensor noisy = clean;
  noisy.dxx += sigma_abs * rng.gaussian();
  noisy.dyy += sigma_abs * rng.gaussian();
  noisy.dzz += sigma_abs * rng.gaussian();
  noisy.dxy += sigma_abs * rng.gaussian();
  noisy.dxz += sigma_abs * rng.gaussian();
  noisy.dyz += sigma_abs * rng.gaussian();
  EigenSystem es = eigendecompose(noisy);
  if (es.lambda3 >= 0.0) return noisy;
  es.lambda1 = std::max(es.lambda1, 0.0);
  es.lambda2 = std::max(es.lambda2, 0.0);
  es.lambda3 = 0.0;
  return from_eigensystem(es);
}

void validate_eigenvalue_spec(const Vec3& inside, const Vec3& outside) {
  if (!(inside.x > inside.y && inside.y >= inside.z && inside.z >= 0.0)) {
    throw InvalidSpecError("phantom: inside eigenvalues must be descending and anisotropic");
  }
  if (!(outside.x == outside.y && outside.y == outside.z && outside.x >= 0.0)) {
    throw InvalidSpecError("phantom: outside eigenvalues must be isotropic");
  }
}

// Catmull-Rom evaluation on segment i of pts (endpoints duplicated), t in [0,1].
Vec3 catmull_rom(const std::vector<Vec3>& pts, std::size_t i, double t) {
  const Vec3& p0 = pts[i == 0 ? 0 : i - 1];
  const Vec3& p1 = pts[i];
  const Vec3& p2 = pts[i + 1];
  const Vec3& p3 = pts[std::min(i + 2, pts.size() - 1)];
  const double t2 = t * t;
  const double t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (p2 - p0) * t +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (3.0 * p1 - p0 - 3.0 * p2 + p3) * t3);
}

struct SampledCurve {
  std::vector<Vec3> points;
  std::vector<Vec3> tangents;
  double min_curvature_radius = 0.0;
};

SampledCurve sample_curve(const std::vector<Vec3>& ctrl, double ds) {
  SampledCurve c;
  if (ctrl.size() < 2) throw InvalidSpecError("curved tube: need at least 2 control points");
  // Rough arc length to pick a sample count per segment.
  for (std::size_t i = 0; i + 1 < ctrl.size(); ++i) {
    const double seg_len = norm(ctrl[i + 1] - ctrl[i]);
    const int steps = std::max(2, static_cast<int>(std::ceil(seg_len / ds)));
    for (int s = (i == 0 ? 0 : 1); s <= steps; ++s) {
      c.points.push_back(catmull_rom(ctrl, i, static_cast<double>(s) / steps));
    }
  }
  c.tangents.resize(c.points.size());
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = std::min(i + 1, c.points.size() - 1);
    const Vec3 d = c.points[b] - c.points[a];
    if (norm(d) == 0.0) throw InvalidSpecError("curved tube: degenerate curve sampling");
    c.tangents[i] = normalized(d);
  }
  // Curvature from tangent turning rate between consecutive samples.
  double max_curvature = 0.0;
  for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
    const double step = norm(c.points[i + 1] - c.points[i]);
    if (step == 0.0) continue;
    const double turn = std::acos(std::clamp(dot(c.tangents[i], c.tangents[i + 1]), -1.0, 1.0));
    max_curvature = std::max(max_curvature, turn / step);
  }
  c.min_curvature_radius =
      max_curvature > 0.0 ? 1.0 / max_curvature : std::numeric_limits<double>::infinity();
  return c;
}

}  // namespace

double torus_distance_to_center_circle(const TorusPhantomSpec& spec, const Vec3& p) {
  const double rho = std::sqrt(p.x * p.x + p.y * p.y);
  const double dr = rho - spec.major_radius;
  return std::sqrt(dr * dr + p.z * p.z);
}

bool torus_contains(const TorusPhantomSpec& spec, const Vec3& p) {
  if (torus_distance_to_center_circle(spec, p) > spec.tube_radius) return false;
  double theta = std::atan2(p.y, p.x) * 180.0 / kPi;
  if (theta < 0.0) theta += 360.0;
  return theta <= spec.arc_span;
}

Vec3 torus_tangent_at(const TorusPhantomSpec& spec, const Vec3& p) {
  (void)spec;
  const double theta = std::atan2(p.y, p.x);
  return {-std::sin(theta), std::cos(theta), 0.0};
}

std::pair<TensorVolume, BinaryMask> generate_torus_phantom(const TorusPhantomSpec& spec) {
  if (!(spec.tube_radius > 0.0 && spec.tube_radius < spec.major_radius)) {
    throw InvalidSpecError("torus phantom: require 0 < tube_radius < major_radius");
  }
  if (!(spec.arc_span > 0.0 && spec.arc_span <= 360.0)) {
    throw InvalidSpecError("torus phantom: arc_span must be in (0, 360]");
  }
  if (spec.noise_sigma < 0.0) throw InvalidSpecError("torus phantom: negative noise_sigma");
  validate_eigenvalue_spec(spec.inside_eigenvalues, spec.outside_eigenvalues);
  const GridGeometry& g = spec.geom;
  if (g.voxel_count() == 0 || g.spacing.x <= 0 || g.spacing.y <= 0 || g.spacing.z <= 0) {
    throw InvalidSpecError("torus phantom: invalid grid geometry");
  }

  TensorVolume vol;
  vol.geom = g;
  vol.data.resize(g.voxel_count());
  BinaryMask mask;
  mask.geom = g;
  mask.data.assign(g.voxel_count(), 0);

  const double sigma_abs = spec.noise_sigma * spec.inside_eigenvalues.x;
  const DiffusionTensor outside = {spec.outside_eigenvalues.x, spec.outside_eigenvalues.y,
                                   spec.outside_eigenvalues.z, 0.0, 0.0, 0.0};

  const std::size_t nxy = static_cast<std::size_t>(g.dims[0]) * g.dims[1];
  parallel_for(g.voxel_count(), [&](std::size_t idx) {
    const int iz = static_cast<int>(idx / nxy);
    const int iy = static_cast<int>((idx % nxy) / g.dims[0]);
    const int ix = static_cast<int>(idx % g.dims[0]);
    const Vec3 p = g.voxel_center(ix, iy, iz);

    DiffusionTensor t;
    if (torus_contains(spec, p)) {
      mask.data[idx] = 1;
      const double theta = std::atan2(p.y, p.x);
      const Vec3 e1 = {-std::sin(theta), std::cos(theta), 0.0};  // circle tangent
      const Vec3 e2 = {std::cos(theta), std::sin(theta), 0.0};   // radial
      const Vec3 e3 = {0.0, 0.0, 1.0};
      t = tensor_from_basis(e1, e2, e3, spec.inside_eigenvalues);
    } else {
      t = outside;
    }
    if (sigma_abs > 0.0) {
      VoxelRng rng(spec.rng_seed, ix, iy, iz);
      t = apply_noise_and_floor(t, sigma_abs, rng);
    }
    vol.data[idx] = t;
  });
  return {std::move(vol), std::move(mask)};
}

std::pair<TensorVolume, BinaryMask> generate_curved_tube_phantom(
    const CurvedTubePhantomSpec& spec) {
  if (spec.tube_radius <= 0.0) throw InvalidSpecError("curved tube: tube_radius must be > 0");
  if (spec.noise_sigma < 0.0) throw InvalidSpecError("curved tube: negative noise_sigma");
  validate_eigenvalue_spec(spec.inside_eigenvalues, spec.outside_eigenvalues);
  const GridGeometry& g = spec.geom;
  if (g.voxel_count() == 0) throw InvalidSpecError("curved tube: invalid grid geometry");

  const double ds = 0.2 * std::min({g.spacing.x, g.spacing.y, g.spacing.z});
  const SampledCurve curve = sample_curve(spec.control_points, ds);
  if (spec.tube_radius >= curve.min_curvature_radius) {
    throw InvalidSpecError("curved tube: tube_radius exceeds local radius of curvature");
  }

  TensorVolume vol;
  vol.geom = g;
  vol.data.resize(g.voxel_count());
  BinaryMask mask;
  mask.geom = g;
  mask.data.assign(g.voxel_count(), 0);

  const double sigma_abs = spec.noise_sigma * spec.inside_eigenvalues.x;
  const DiffusionTensor outside = {spec.outside_eigenvalues.x, spec.outside_eigenvalues.y,
                                   spec.outside_eigenvalues.z, 0.0, 0.0, 0.0};

  const std::size_t nxy = static_cast<std::size_t>(g.dims[0]) * g.dims[1];
  parallel_for(g.voxel_count(), [&](std::size_t idx) {
    const int iz = static_cast<int>(idx / nxy);
    const int iy = static_cast<int>((idx % nxy) / g.dims[0]);
    const int ix = static_cast<int>(idx % g.dims[0]);
    const Vec3 p = g.voxel_center(ix, iy, iz);

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const double d2 = norm2(p - curve.points[i]);
      if (d2 < best) {
        best = d2;
        best_i = i;
      }
    }

    DiffusionTensor t;
    if (std::sqrt(best) <= spec.tube_radius) {
      mask.data[idx] = 1;
      const Vec3 e1 = curve.tangents[best_i];
      Vec3 ref = std::abs(e1.x) > 0.9 ? Vec3{0.0, 1.0, 0.0} : Vec3{1.0, 0.0, 0.0};
      const Vec3 e2 = normalized(ref - dot(ref, e1) * e1);
      const Vec3 e3 = cross(e1, e2);
      t = tensor_from_basis(e1, e2, e3, spec.inside_eigenvalues);
    } else {
      t = outside;
    }
    if (sigma_abs > 0.0) {
      VoxelRng rng(spec.rng_seed, ix, iy, iz);
      t = apply_noise_and_floor(t, sigma_abs, rng);
    }
    vol.data[idx] = t;
  });
  return {std::move(vol), std::move(mask)};
}

}  // namespace fiberseg
