#pragma once

#include <string>
#include <vector>

#include "fiberseg/ray_seg.hpp"

namespace fiberseg {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // CCW from outside
};

// Boundary points in world space: frame origin + radius * ray direction.
std::vector<Vec3> boundary_points(const BoundaryField& b, const std::vector<PlaneFrame>& frames);

// Open tube over the n x k contour points (row-major, k per plane).
TriangleMesh triangulate(const std::vector<Vec3>& points, int n, int k);

// Adds centerline-fan caps at both ends and flips the winding globally if the
// signed volume came out negative.
TriangleMesh cap_ends(const TriangleMesh& tube, int n, int k, const Vec3& first_origin,
                      const Vec3& last_origin);

enum class MeshFormat { OBJ, STL };

void export_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format);
TriangleMesh import_obj(const std::string& path);

// Audit helpers (also used by the acceptance suite).
bool is_watertight(const TriangleMesh& mesh);
bool is_consistently_oriented(const TriangleMesh& mesh);
int euler_characteristic(const TriangleMesh& mesh);
double signed_volume(const TriangleMesh& mesh);

// Warn-only diagnostic: indices of consecutive planes whose contours cross.
std::vector<int> detect_contour_crossings(const std::vector<Vec3>& points, int n, int k);

}  // namespace fiberseg
