#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fiberseg/volume.hpp"

namespace fiberseg {

// Torus portion centered at the world origin with the z axis as torus axis.
// The swept arc starts at angle 0 (the +x direction) and covers arc_span
// degrees counter-clockwise in the xy plane.
struct TorusPhantomSpec {
  double major_radius = 40.0;       // mm, center-circle radius
  double tube_radius = 5.0;         // mm, cross-section radius (paper: 10mm diameter)
  double arc_span = 90.0;           // degrees
  GridGeometry geom;
  Vec3 inside_eigenvalues = {1.0e-3, 0.2e-3, 0.2e-3};   // mm^2/s, descending
  Vec3 outside_eigenvalues = {0.7e-3, 0.7e-3, 0.7e-3};  // isotropic background
  double noise_sigma = 0.0;         // relative to inside lambda1
  uint64_t rng_seed = 0;
};

// Tube swept along a Catmull-Rom cubic through the control points.
struct CurvedTubePhantomSpec {
  std::vector<Vec3> control_points;
  double tube_radius = 5.0;
  GridGeometry geom;
  Vec3 inside_eigenvalues = {1.0e-3, 0.2e-3, 0.2e-3};
  Vec3 outside_eigenvalues = {0.7e-3, 0.7e-3, 0.7e-3};
  double noise_sigma = 0.0;
  uint64_t rng_seed = 0;
};

std::pair<TensorVolume, BinaryMask> generate_torus_phantom(const TorusPhantomSpec& spec);

std::pair<TensorVolume, BinaryMask> generate_curved_tube_phantom(
    const CurvedTubePhantomSpec& spec);

// Analytic helpers for the torus, shared with tests and the acceptance suite.
double torus_distance_to_center_circle(const TorusPhantomSpec& spec, const Vec3& p);
bool torus_contains(const TorusPhantomSpec& spec, const Vec3& p);
Vec3 torus_tangent_at(const TorusPhantomSpec& spec, const Vec3& p);

}  // namespace fiberseg
