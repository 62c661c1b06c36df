#pragma once

#include <string>
#include <vector>

#include "fiberseg/centerline.hpp"
#include "fiberseg/volume.hpp"

namespace fiberseg {

struct GridParams {
  int n = 30;       // planes
  int k = 36;       // rays per plane
  int m = 40;       // samples per ray
  double d = 0.5;   // sample spacing, mm
};

struct EvalPoint {
  Vec3 position;
  double fa = 0.0;
  double alpha_c = 90.0;  // degrees vs the in-plane centerline direction
  double alpha_n = 90.0;  // degrees vs the previous point along the ray
  bool in_bounds = false;
};

// n x k x m lattice of evaluation points around the centerline. The sample of
// ray r at depth j sits at origin + (j+1)*d along dir(p,r).
struct EvalGrid {
  GridParams params;
  std::vector<PlaneFrame> frames;
  std::vector<EvalPoint> points;  // indexed (plane, ray, depth), depth fastest

  std::size_t index(int p, int r, int j) const {
    return (static_cast<std::size_t>(p) * params.k + r) * params.m + j;
  }
  const EvalPoint& at(int p, int r, int j) const { return points[index(p, r, j)]; }
  Vec3 ray_direction(int p, int r) const;
};

// Window size r >= voxel diagonal / d, at least 1.
int window_size(const Vec3& voxel_spacing, double d);

EvalGrid build_grid(const TensorVolume& vol, const std::vector<PlaneFrame>& frames,
                    const GridParams& gp);

// Diagnostic dump: (fa, alpha_c, alpha_n) per lattice node in the volume file
// format, dims (m, k, n).
void save_grid_attributes(const EvalGrid& grid, const std::string& path);

}  // namespace fiberseg
