#include "fiberseg/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "fiberseg/error.hpp"
#include "fiberseg/parallel.hpp"

namespace fiberseg {

namespace {

bool segments_intersect(const std::array<double, 2>& a, const std::array<double, 2>& b,
                        const std::array<double, 2>& c, const std::array<double, 2>& d) {
  auto orient = [](const std::array<double, 2>& p, const std::array<double, 2>& q,
                   const std::array<double, 2>& r) {
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
  };
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

struct Crossing {
  std::size_t segment;  // index of the segment's first vertex
  double t;             // parameter along the segment
  Vec3 point;
};

// First intersection of the polyline with the region plane that lands inside
// the polygon.
std::optional<Crossing> first_crossing(const Streamline& fiber, const PlanarRegion& region) {
  for (std::size_t i = 0; i + 1 < fiber.points.size(); ++i) {
    const double s0 = dot(fiber.points[i] - region.origin, region.normal);
    const double s1 = dot(fiber.points[i + 1] - region.origin, region.normal);
    if ((s0 > 0.0 && s1 > 0.0) || (s0 < 0.0 && s1 < 0.0)) continue;
    if (s0 == 0.0 && s1 == 0.0) continue;  // segment lies in the plane
    const double t = s0 / (s0 - s1);
    const Vec3 q = fiber.points[i] + t * (fiber.points[i + 1] - fiber.points[i]);
    const double u = dot(q - region.origin, region.basis_u);
    const double v = dot(q - region.origin, region.basis_v);
    if (region_contains_uv(region, u, v)) return Crossing{i, t, q};
  }
  return std::nullopt;
}

}  // namespace

double Streamline::length() const {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) len += norm(points[i + 1] - points[i]);
  return len;
}

void validate_region(const PlanarRegion& region) {
  const double tol = 1e-6;
  if (std::abs(norm(region.normal) - 1.0) > tol || std::abs(norm(region.basis_u) - 1.0) > tol ||
      std::abs(norm(region.basis_v) - 1.0) > tol) {
    throw InvalidRegionError("region: normal/basis vectors must be unit length");
  }
  if (std::abs(dot(region.normal, region.basis_u)) > tol ||
      std::abs(dot(region.normal, region.basis_v)) > tol ||
      std::abs(dot(region.basis_u, region.basis_v)) > tol) {
    throw InvalidRegionError("region: normal/basis vectors must be orthogonal");
  }
  const auto& poly = region.polygon;
  if (poly.size() < 3) throw InvalidRegionError("region: polygon needs at least 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    area2 += p[0] * q[1] - q[0] * p[1];
  }
  if (std::abs(area2) < 1e-12) throw InvalidRegionError("region: degenerate polygon");
  for (std::size_t i = 0; i < poly.size(); ++i) {
    for (std::size_t j = i + 1; j < poly.size(); ++j) {
      if (j == i + 1 || (i == 0 && j == poly.size() - 1)) continue;  // adjacent edges
      if (segments_intersect(poly[i], poly[(i + 1) % poly.size()], poly[j],
                             poly[(j + 1) % poly.size()])) {
        throw InvalidRegionError("region: self-intersecting polygon");
      }
    }
  }
}

bool region_contains_uv(const PlanarRegion& region, double u, double v) {
  bool inside = false;
  const auto& poly = region.polygon;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const bool crosses = (poly[i][1] > v) != (poly[j][1] > v);
    if (crosses &&
        u < (poly[j][0] - poly[i][0]) * (v - poly[i][1]) / (poly[j][1] - poly[i][1]) + poly[i][0]) {
      inside = !inside;
    }
  }
  return inside;
}

std::vector<Vec3> seed_points(const PlanarRegion& region, double density) {
  validate_region(region);
  if (density <= 0.0) throw InvalidParameterError("seed_points: density must be > 0");
  double umin = std::numeric_limits<double>::infinity(), umax = -umin;
  double vmin = umin, vmax = -umin;
  for (const auto& p : region.polygon) {
    umin = std::min(umin, p[0]);
    umax = std::max(umax, p[0]);
    vmin = std::min(vmin, p[1]);
    vmax = std::max(vmax, p[1]);
  }
  const double h = 1.0 / std::sqrt(density);
  std::vector<Vec3> seeds;
  for (double v = vmin + 0.5 * h; v < vmax; v += h) {
    for (double u = umin + 0.5 * h; u < umax; u += h) {
      if (region_contains_uv(region, u, v)) {
        seeds.push_back(region.origin + u * region.basis_u + v * region.basis_v);
      }
    }
  }
  return seeds;
}

Streamline track_fiber(const TensorVolume& vol, const Vec3& seed, const TrackingParams& p) {
  const auto seed_tensor = try_sample_tensor(vol, seed);
  if (!seed_tensor) throw OutOfBoundsError("track_fiber: seed outside volume");
  if (fractional_anisotropy(*seed_tensor) < p.fa_stop) return {};

  const Vec3 e1 = principal_direction(*seed_tensor);

  auto integrate_half = [&](const Vec3& dir_init) {
    std::vector<Vec3> half;
    Vec3 x = seed;
    Vec3 dir_prev = dir_init;
    for (int step = 0; step < p.max_steps; ++step) {
      const auto t = try_sample_tensor(vol, x);
      if (!t) break;
      Vec3 dir = principal_direction(*t);
      if (dot(dir, dir_prev) < 0.0) dir = -dir;
      if (angle_between_principal(dir, dir_prev) > p.angle_stop) break;
      const Vec3 xn = x + p.step_size * dir;
      const auto tn = try_sample_tensor(vol, xn);
      if (!tn) break;
      if (fractional_anisotropy(*tn) < p.fa_stop) break;
      half.push_back(xn);
      x = xn;
      dir_prev = dir;
    }
    return half;
  };

  const auto forward = integrate_half(e1);
  const auto backward = integrate_half(-e1);

  Streamline out;
  out.points.reserve(backward.size() + 1 + forward.size());
  out.points.insert(out.points.end(), backward.rbegin(), backward.rend());
  out.points.push_back(seed);
  out.points.insert(out.points.end(), forward.begin(), forward.end());
  return out;
}

std::vector<Streamline> restrict_and_crop(const std::vector<Streamline>& fibers,
                                          const PlanarRegion& a, const PlanarRegion& b) {
  validate_region(a);
  validate_region(b);
  std::vector<Streamline> kept;
  for (const auto& fiber : fibers) {
    if (fiber.points.size() < 2) continue;
    const auto ca = first_crossing(fiber, a);
    const auto cb = first_crossing(fiber, b);
    if (!ca || !cb) continue;

    const Crossing& lo = (ca->segment < cb->segment ||
                          (ca->segment == cb->segment && ca->t <= cb->t))
                             ? *ca
                             : *cb;
    const Crossing& hi = (&lo == &*ca) ? *cb : *ca;

    Streamline cropped;
    cropped.points.push_back(lo.point);
    for (std::size_t i = lo.segment + 1; i <= hi.segment; ++i) {
      cropped.points.push_back(fiber.points[i]);
    }
    cropped.points.push_back(hi.point);
    // Drop coincident neighbors introduced by crossings on shared vertices.
    auto last = std::unique(cropped.points.begin(), cropped.points.end(),
                            [](const Vec3& x, const Vec3& y) { return norm(x - y) < 1e-12; });
    cropped.points.erase(last, cropped.points.end());
    if (cropped.points.size() < 2) continue;
    if (&lo == &*cb) std::reverse(cropped.points.begin(), cropped.points.end());
    kept.push_back(std::move(cropped));
  }
  if (kept.empty()) {
    throw EmptyBundleError("restrict_and_crop: no fiber crosses both include regions");
  }
  return kept;
}

void save_streamlines(const std::vector<Streamline>& fibers, const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& f : fibers) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : f.points) pts.push_back({p.x, p.y, p.z});
    j.push_back(std::move(pts));
  }
  std::ofstream out(path);
  if (!out) throw FileError("cannot write " + path);
  out << j.dump() << "\n";
}

std::vector<Streamline> load_streamlines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FileError("malformed streamline file " + path + ": " + e.what());
  }
  std::vector<Streamline> fibers;
  for (const auto& pts : j) {
    Streamline f;
    for (const auto& p : pts) f.points.push_back({p.at(0), p.at(1), p.at(2)});
    fibers.push_back(std::move(f));
  }
  return fibers;
}

}  // namespace fiberseg
