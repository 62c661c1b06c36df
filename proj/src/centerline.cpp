#include "fiberseg/centerline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fiberseg/error.hpp"

namespace fiberseg {

std::vector<Vec3> resample_polyline(const std::vector<Vec3>& points, int n) {
  if (n < 2) throw InvalidParameterError("resample_polyline: need n >= 2");
  if (points.size() < 2) throw InvalidParameterError("resample_polyline: need >= 2 points");

  std::vector<double> cum(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    cum[i] = cum[i - 1] + norm(points[i] - points[i - 1]);
  }
  const double total = cum.back();
  if (total <= 0.0) throw InvalidParameterError("resample_polyline: zero-length polyline");

  std::vector<Vec3> out(n);
  out[0] = points.front();
  out[n - 1] = points.back();
  std::size_t seg = 0;
  for (int i = 1; i < n - 1; ++i) {
    const double s = total * i / (n - 1);
    while (seg + 2 < points.size() && cum[seg + 1] < s) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = seg_len > 0.0 ? (s - cum[seg]) / seg_len : 0.0;
    out[i] = points[seg] + t * (points[seg + 1] - points[seg]);
  }
  return out;
}

Centerline compute_centerline(const std::vector<Streamline>& fibers, int samples_per_fiber) {
  if (fibers.empty()) throw EmptyBundleError("compute_centerline: empty fiber set");
  if (samples_per_fiber < 2) {
    throw InvalidParameterError("compute_centerline: samples_per_fiber must be >= 2");
  }
  Centerline c;
  c.points.assign(samples_per_fiber, Vec3{});
  for (const auto& fiber : fibers) {
    const auto resampled = resample_polyline(fiber.points, samples_per_fiber);
    for (int i = 0; i < samples_per_fiber; ++i) c.points[i] += resampled[i];
  }
  for (auto& p : c.points) p = p / static_cast<double>(fibers.size());
  return c;
}

Centerline sample_centerline(const Centerline& c, int n) {
  if (n < 2) throw InvalidParameterError("sample_centerline: need n >= 2");
  return {resample_polyline(c.points, n)};
}

std::vector<PlaneFrame> build_frames(const Centerline& samples) {
  const auto& pts = samples.points;
  if (pts.size() < 2) throw InvalidParameterError("build_frames: need >= 2 samples");

  const std::size_t n = pts.size();
  std::vector<Vec3> tangents(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec3 d = pts[i + 1] - pts[i];
    if (norm(d) < 1e-12) {
      throw DegenerateTangentError("build_frames: repeated consecutive samples");
    }
    tangents[i] = normalized(d);
  }
  tangents[n - 1] = tangents[n - 2];

  std::vector<PlaneFrame> frames(n);
  // Initial in-plane basis from a fixed reference, avoiding near-parallel cases.
  Vec3 ref = std::abs(dot(tangents[0], Vec3{1, 0, 0})) > 0.9 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
  Vec3 u = normalized(ref - dot(ref, tangents[0]) * tangents[0]);
  frames[0] = {pts[0], tangents[0], u, cross(tangents[0], u)};

  // Double-reflection rotation-minimizing frame propagation.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec3 v1 = pts[i + 1] - pts[i];
    const double c1 = dot(v1, v1);
    const Vec3 uL = frames[i].u - (2.0 / c1) * dot(v1, frames[i].u) * v1;
    const Vec3 tL = frames[i].tangent - (2.0 / c1) * dot(v1, frames[i].tangent) * v1;
    const Vec3 v2 = tangents[i + 1] - tL;
    const double c2 = dot(v2, v2);
    Vec3 un = c2 > 1e-30 ? uL - (2.0 / c2) * dot(v2, uL) * v2 : uL;
    un = normalized(un - dot(un, tangents[i + 1]) * tangents[i + 1]);
    frames[i + 1] = {pts[i + 1], tangents[i + 1], un, cross(tangents[i + 1], un)};
  }
  return frames;
}

void save_frames(const std::vector<PlaneFrame>& frames, const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& f : frames) {
    j.push_back({{"origin", {f.origin.x, f.origin.y, f.origin.z}},
                 {"tangent", {f.tangent.x, f.tangent.y, f.tangent.z}},
                 {"u", {f.u.x, f.u.y, f.u.z}},
                 {"v", {f.v.x, f.v.y, f.v.z}}});
  }
  std::ofstream out(path);
  if (!out) throw FileError("cannot write " + path);
  out << j.dump() << "\n";
}

std::vector<PlaneFrame> load_frames(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FileError("malformed frame file " + path + ": " + e.what());
  }
  auto vec = [](const nlohmann::json& a) { return Vec3{a.at(0), a.at(1), a.at(2)}; };
  std::vector<PlaneFrame> frames;
  for (const auto& f : j) {
    frames.push_back({vec(f.at("origin")), vec(f.at("tangent")), vec(f.at("u")), vec(f.at("v"))});
  }
  return frames;
}

}  // namespace fiberseg
