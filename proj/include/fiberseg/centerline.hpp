#pragma once

#include <string>
#include <vector>

#include "fiberseg/tracking.hpp"

namespace fiberseg {

struct Centerline {
  std::vector<Vec3> points;
};

// Orthonormal right-handed triad {tangent, u, v} with v = tangent x u.
struct PlaneFrame {
  Vec3 origin;
  Vec3 tangent;
  Vec3 u;
  Vec3 v;
};

// Arc-length resampling of a polyline to n equidistant points (endpoints kept).
std::vector<Vec3> resample_polyline(const std::vector<Vec3>& points, int n);

// Mean of arc-length-resampled fibers, pointwise.
Centerline compute_centerline(const std::vector<Streamline>& fibers, int samples_per_fiber);

Centerline sample_centerline(const Centerline& c, int n);

// Forward-difference tangents plus rotation-minimizing (double reflection)
// propagation of the in-plane basis.
std::vector<PlaneFrame> build_frames(const Centerline& samples);

void save_frames(const std::vector<PlaneFrame>& frames, const std::string& path);
std::vector<PlaneFrame> load_frames(const std::string& path);

}  // namespace fiberseg
