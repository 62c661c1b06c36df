#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "fiberseg/error.hpp"
#include "fiberseg/mesh.hpp"

using namespace fiberseg;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Straight-z centerline frames, one per plane.
std::vector<PlaneFrame> straight_frames(int n, double spacing) {
  std::vector<PlaneFrame> frames(n);
  for (int p = 0; p < n; ++p) {
    frames[p] = {{0.0, 0.0, p * spacing}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  }
  return frames;
}

BoundaryField constant_field(int n, int k, double radius) {
  BoundaryField b;
  b.n = n;
  b.k = k;
  b.d = 0.5;
  b.radius.assign(static_cast<std::size_t>(n) * k, radius);
  b.saturated.assign(b.radius.size(), 0);
  return b;
}

TriangleMesh cylinder_mesh(int n, int k, double radius, double length) {
  const auto frames = straight_frames(n, length / (n - 1));
  const auto pts = boundary_points(constant_field(n, k, radius), frames);
  const TriangleMesh tube = triangulate(pts, n, k);
  return cap_ends(tube, n, k, frames.front().origin, frames.back().origin);
}

std::size_t edge_count(const TriangleMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      const int a = f[i], b = f[(i + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return edges.size();
}

}  // namespace

TEST_CASE("boundary_points: radius zero collapses to plane origins; distances exact") {
  const auto frames = straight_frames(3, 2.0);
  auto pts = boundary_points(constant_field(3, 4, 0.0), frames);
  REQUIRE(pts.size() == 12);
  for (int p = 0; p < 3; ++p) {
    for (int r = 0; r < 4; ++r) {
      CHECK(norm(pts[p * 4 + r] - frames[p].origin) == doctest::Approx(0.0));
    }
  }

  BoundaryField b = constant_field(3, 4, 2.5);
  b.at(1, 2) = 4.0;
  pts = boundary_points(b, frames);
  for (int p = 0; p < 3; ++p) {
    for (int r = 0; r < 4; ++r) {
      CHECK(norm(pts[p * 4 + r] - frames[p].origin) ==
            doctest::Approx(b.at(p, r)).epsilon(1e-9));
    }
  }
}

TEST_CASE("triangulate: counts and fixed diagonal") {
  const auto frames = straight_frames(2, 1.0);
  const auto pts = boundary_points(constant_field(2, 3, 1.0), frames);
  const TriangleMesh tube = triangulate(pts, 2, 3);
  CHECK(tube.vertices.size() == 6);
  CHECK(tube.faces.size() == 6);
  // first quad split: (P[0][0], P[0][1], P[1][0]) and (P[0][1], P[1][1], P[1][0])
  CHECK(tube.faces[0] == std::array<int, 3>{0, 1, 3});
  CHECK(tube.faces[1] == std::array<int, 3>{1, 4, 3});

  const auto big = boundary_points(constant_field(30, 36, 3.0), straight_frames(30, 0.5));
  CHECK(triangulate(big, 30, 36).faces.size() == 2 * 36 * 29);
}

TEST_CASE("triangulate: open tube edge audit") {
  const auto pts = boundary_points(constant_field(4, 5, 2.0), straight_frames(4, 1.0));
  const TriangleMesh tube = triangulate(pts, 4, 5);
  std::map<std::pair<int, int>, int> edge_faces;
  for (const auto& f : tube.faces) {
    for (int i = 0; i < 3; ++i) {
      const int a = f[i], b = f[(i + 1) % 3];
      ++edge_faces[{std::min(a, b), std::max(a, b)}];
    }
  }
  int boundary_edges = 0;
  for (const auto& [e, c] : edge_faces) {
    CHECK(c <= 2);
    if (c == 1) ++boundary_edges;
  }
  CHECK(boundary_edges == 2 * 5);  // the two open rims
}

TEST_CASE("triangulate: coincident contour points raise with the plane index") {
  auto pts = boundary_points(constant_field(3, 4, 0.0), straight_frames(3, 1.0));
  try {
    triangulate(pts, 3, 4);
    FAIL("expected DegenerateFaceError");
  } catch (const DegenerateFaceError& e) {
    CHECK(std::string(e.what()).find("0") != std::string::npos);
  }
}

TEST_CASE("cap_ends: closed cylinder counts, Euler characteristic, audits") {
  const TriangleMesh mesh = cylinder_mesh(2, 3, 1.0, 2.0);
  CHECK(mesh.vertices.size() == 8);
  CHECK(mesh.faces.size() == 12);
  CHECK(edge_count(mesh) == 18);
  CHECK(euler_characteristic(mesh) == 2);
  CHECK(is_watertight(mesh));
  CHECK(is_consistently_oriented(mesh));

  const TriangleMesh big = cylinder_mesh(30, 36, 3.0, 15.0);
  CHECK(big.faces.size() == 2 * 36 * 29 + 2 * 36);
  CHECK(euler_characteristic(big) == 2);
  CHECK(is_watertight(big));
  CHECK(is_consistently_oriented(big));
}

TEST_CASE("cap_ends: outward normals and positive enclosed volume") {
  const int k = 36;
  const double R0 = 2.0, L = 10.0;
  const TriangleMesh mesh = cylinder_mesh(8, k, R0, L);

  const double vol = signed_volume(mesh);
  CHECK(vol > 0.0);
  const double exact = kPi * R0 * R0 * L;
  const double tol = 2.0 * (2.0 * kPi / k) * (2.0 * kPi / k);
  CHECK(std::abs(vol - exact) / exact <= tol);

  // every face normal points away from the axis or along it (caps)
  for (const auto& f : mesh.faces) {
    const Vec3 a = mesh.vertices[f[0]];
    const Vec3 nrm = cross(mesh.vertices[f[1]] - a, mesh.vertices[f[2]] - a);
    const Vec3 c = (a + mesh.vertices[f[1]] + mesh.vertices[f[2]]) / 3.0;
    Vec3 outward{c.x, c.y, 0.0};
    if (c.z < 1e-9) outward = {0.0, 0.0, -1.0};
    else if (c.z > L - 1e-9) outward = {0.0, 0.0, 1.0};
    CHECK(dot(nrm, outward) > 0.0);
  }
}

TEST_CASE("export/import: OBJ round trip and STL size") {
  const TriangleMesh mesh = cylinder_mesh(3, 5, 1.5, 4.0);
  export_mesh(mesh, "mesh_test.obj", MeshFormat::OBJ);
  const TriangleMesh back = import_obj("mesh_test.obj");
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  REQUIRE(back.faces.size() == mesh.faces.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK(norm(back.vertices[i] - mesh.vertices[i]) <= 1e-6);
  }
  CHECK(back.faces == mesh.faces);

  export_mesh(mesh, "mesh_test.stl", MeshFormat::STL);
  std::ifstream stl("mesh_test.stl", std::ios::binary | std::ios::ate);
  REQUIRE(stl.good());
  CHECK(static_cast<std::size_t>(stl.tellg()) == 84 + 50 * mesh.faces.size());
}

TEST_CASE("export OBJ: line counts for a tetrahedron") {
  TriangleMesh tet;
  tet.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  tet.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  export_mesh(tet, "tet_test.obj", MeshFormat::OBJ);
  std::ifstream in("tet_test.obj");
  int v = 0, f = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) ++f;
  }
  CHECK(v == 4);
  CHECK(f == 4);
}

TEST_CASE("detect_contour_crossings: clean tube silent, folded tube flagged") {
  const auto frames = straight_frames(3, 1.0);
  auto pts = boundary_points(constant_field(3, 8, 2.0), frames);
  CHECK(detect_contour_crossings(pts, 3, 8).empty());

  // tilt the middle contour so one side dips behind the first plane
  for (int r = 0; r < 8; ++r) {
    Vec3& q = pts[1 * 8 + r];
    q.z += (q.x > 0 ? 3.0 : -3.0);
  }
  const auto crossings = detect_contour_crossings(pts, 3, 8);
  CHECK(!crossings.empty());
}
