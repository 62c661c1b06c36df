#pragma once

#include <vector>

#include "fiberseg/volume.hpp"

namespace fiberseg {

// Planar polygon region: polygon vertices are (u,v) coordinates in the plane
// spanned by basis_u/basis_v through origin.
struct PlanarRegion {
  Vec3 origin;
  Vec3 normal;
  Vec3 basis_u;
  Vec3 basis_v;
  std::vector<std::array<double, 2>> polygon;
};

struct Streamline {
  std::vector<Vec3> points;

  bool empty() const { return points.empty(); }
  double length() const;
};

struct TrackingParams {
  double step_size = 0.5;      // mm
  double fa_stop = 0.15;
  double angle_stop = 45.0;    // degrees
  int max_steps = 2000;
  double seed_density = 4.0;   // points per mm^2
};

void validate_region(const PlanarRegion& region);

// Point-in-polygon in the region's (u,v) coordinates (even-odd rule).
bool region_contains_uv(const PlanarRegion& region, double u, double v);

// Regular grid of spacing 1/sqrt(density) over the polygon bounding box,
// filtered by point-in-polygon and mapped to 3D.
std::vector<Vec3> seed_points(const PlanarRegion& region, double density);

// Bidirectional Euler integration of the principal-direction field.
Streamline track_fiber(const TensorVolume& vol, const Vec3& seed, const TrackingParams& p);

// Keep fibers crossing both region polygons; crop each survivor between its
// two crossing points and orient it a -> b.
std::vector<Streamline> restrict_and_crop(const std::vector<Streamline>& fibers,
                                          const PlanarRegion& a, const PlanarRegion& b);

// Streamline set JSON (array of arrays of [x,y,z]) for fixtures/inspection.
void save_streamlines(const std::vector<Streamline>& fibers, const std::string& path);
std::vector<Streamline> load_streamlines(const std::string& path);

}  // namespace fiberseg
