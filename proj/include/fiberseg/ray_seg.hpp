#pragma once

#include <string>
#include <vector>

#include "fiberseg/raygrid.hpp"

namespace fiberseg {

struct RayThresholds {
  double t_fa = 0.25;
  double t_alpha_c = 40.0;  // degrees
  double t_alpha_n = 30.0;  // degrees
  int r = 1;                // window size, from window_size()
};

// Per-(plane, ray) boundary radius in mm.
struct BoundaryField {
  int n = 0;
  int k = 0;
  double d = 0.0;
  std::vector<double> radius;          // row-major n x k
  std::vector<uint8_t> saturated;      // rays whose boundary was never found
  std::string provenance;

  double& at(int p, int r) { return radius[static_cast<std::size_t>(p) * k + r]; }
  double at(int p, int r) const { return radius[static_cast<std::size_t>(p) * k + r]; }
};

// A point passes when fa >= t_fa, alpha_c <= t_alpha_c and alpha_n <=
// t_alpha_n. Walking outward, the boundary is the start of the first window
// [j - min(j,r), j] whose points all fail; radius = (window start) * d. Rays
// with no such window saturate at m*d.
BoundaryField detect_boundary(const EvalGrid& grid, const RayThresholds& th);

// Windowed-median outlier clamp over 5 consecutive rays of the same plane
// (wrapping in ray index); one sweep from pre-sweep values.
BoundaryField in_plane_correction(const BoundaryField& b, double max_ratio);

// Same clamp along the plane axis for each ray index (window 5, truncated at
// the ends, non-wrapping).
BoundaryField intra_plane_correction(const BoundaryField& b, double max_ratio);

void save_boundary_field(const BoundaryField& b, const std::string& path);
BoundaryField load_boundary_field(const std::string& path);

}  // namespace fiberseg
