#include "fiberseg/mesh.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fiberseg/error.hpp"

namespace fiberseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 ray_dir(const PlaneFrame& frame, int r, int k) {
  const double phi = 2.0 * kPi * r / k;
  return std::cos(phi) * frame.u + std::sin(phi) * frame.v;
}

}  // namespace

std::vector<Vec3> boundary_points(const BoundaryField& b, const std::vector<PlaneFrame>& frames) {
  if (static_cast<int>(frames.size()) != b.n) {
    throw InvalidParameterError("boundary_points: frame count does not match field");
  }
  std::vector<Vec3> points(static_cast<std::size_t>(b.n) * b.k);
  for (int p = 0; p < b.n; ++p) {
    for (int r = 0; r < b.k; ++r) {
      points[static_cast<std::size_t>(p) * b.k + r] =
          frames[p].origin + b.at(p, r) * ray_dir(frames[p], r, b.k);
    }
  }
  return points;
}

TriangleMesh triangulate(const std::vector<Vec3>& points, int n, int k) {
  if (n < 2 || k < 3) throw InvalidParameterError("triangulate: need n >= 2 and k >= 3");
  if (points.size() != static_cast<std::size_t>(n) * k) {
    throw InvalidParameterError("triangulate: point count does not match n*k");
  }
  for (int p = 0; p < n; ++p) {
    for (int r = 0; r < k; ++r) {
      const Vec3& a = points[static_cast<std::size_t>(p) * k + r];
      const Vec3& b = points[static_cast<std::size_t>(p) * k + (r + 1) % k];
      if (norm(a - b) < 1e-12) {
        throw DegenerateFaceError("triangulate: coincident contour points in plane " +
                                  std::to_string(p));
      }
    }
  }

  TriangleMesh mesh;
  mesh.vertices = points;
  mesh.faces.reserve(static_cast<std::size_t>(2) * k * (n - 1));
  auto idx = [k](int p, int r) { return p * k + r; };
  for (int p = 0; p + 1 < n; ++p) {
    for (int r = 0; r < k; ++r) {
      const int r1 = (r + 1) % k;
      mesh.faces.push_back({idx(p, r), idx(p, r1), idx(p + 1, r)});
      mesh.faces.push_back({idx(p, r1), idx(p + 1, r1), idx(p + 1, r)});
    }
  }
  return mesh;
}

TriangleMesh cap_ends(const TriangleMesh& tube, int n, int k, const Vec3& first_origin,
                      const Vec3& last_origin) {
  if (tube.vertices.size() != static_cast<std::size_t>(n) * k) {
    throw InvalidParameterError("cap_ends: tube vertex count does not match n*k");
  }
  TriangleMesh mesh = tube;
  const int c_first = static_cast<int>(mesh.vertices.size());
  mesh.vertices.push_back(first_origin);
  const int c_last = c_first + 1;
  mesh.vertices.push_back(last_origin);

  auto idx = [k](int p, int r) { return p * k + r; };
  for (int r = 0; r < k; ++r) {
    const int r1 = (r + 1) % k;
    mesh.faces.push_back({c_first, idx(0, r1), idx(0, r)});
    mesh.faces.push_back({c_last, idx(n - 1, r), idx(n - 1, r1)});
  }

  if (signed_volume(mesh) < 0.0) {
    for (auto& f : mesh.faces) std::swap(f[1], f[2]);
  }
  return mesh;
}

void export_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format) {
  if (format == MeshFormat::OBJ) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    out.precision(9);
    for (const auto& v : mesh.vertices) out << "v " << v.x << " " << v.y << " " << v.z << "\n";
    for (const auto& f : mesh.faces) {
      out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    }
    if (!out) throw FileError("write failure on " + path);
    return;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write " + path);
  char header[80] = {0};
  std::snprintf(header, sizeof(header), "fiberseg binary STL");
  out.write(header, 80);
  const uint32_t count = static_cast<uint32_t>(mesh.faces.size());
  out.write(reinterpret_cast<const char*>(&count), 4);
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    Vec3 nrm = cross(b - a, c - a);
    const double len = norm(nrm);
    if (len > 0.0) nrm = nrm / len;
    const Vec3 vecs[4] = {nrm, a, b, c};
    for (const auto& v : vecs) {
      const float xyz[3] = {static_cast<float>(v.x), static_cast<float>(v.y),
                            static_cast<float>(v.z)};
      out.write(reinterpret_cast<const char*>(xyz), 12);
    }
    const uint16_t attr = 0;
    out.write(reinterpret_cast<const char*>(&attr), 2);
  }
  if (!out) throw FileError("write failure on " + path);
}

TriangleMesh import_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot read " + path);
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v.x >> v.y >> v.z;
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<int, 3> f{};
      ls >> f[0] >> f[1] >> f[2];
      mesh.faces.push_back({f[0] - 1, f[1] - 1, f[2] - 1});
    }
  }
  return mesh;
}

bool is_watertight(const TriangleMesh& mesh) {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& f : mesh.faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) return false;
    for (int e = 0; e < 3; ++e) {
      const int a = f[e];
      const int b = f[(e + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  }
  for (const auto& [edge, count] : edges) {
    if (count != 2) return false;
  }
  return !mesh.faces.empty();
}

bool is_consistently_oriented(const TriangleMesh& mesh) {
  std::set<std::pair<int, int>> directed;
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      if (!directed.insert({f[e], f[(e + 1) % 3]}).second) return false;
    }
  }
  return true;
}

int euler_characteristic(const TriangleMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      const int a = f[e];
      const int b = f[(e + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return static_cast<int>(mesh.vertices.size()) - static_cast<int>(edges.size()) +
         static_cast<int>(mesh.faces.size());
}

double signed_volume(const TriangleMesh& mesh) {
  double vol = 0.0;
  for (const auto& f : mesh.faces) {
    vol += dot(mesh.vertices[f[0]], cross(mesh.vertices[f[1]], mesh.vertices[f[2]]));
  }
  return vol / 6.0;
}

std::vector<int> detect_contour_crossings(const std::vector<Vec3>& points, int n, int k) {
  std::vector<int> crossings;
  auto centroid = [&](int p) {
    Vec3 c;
    for (int r = 0; r < k; ++r) c += points[static_cast<std::size_t>(p) * k + r];
    return c / static_cast<double>(k);
  };
  for (int p = 0; p + 1 < n; ++p) {
    const Vec3 axis = centroid(p + 1) - centroid(p);
    bool folded = false;
    for (int r = 0; r < k && !folded; ++r) {
      const Vec3 step = points[static_cast<std::size_t>(p + 1) * k + r] -
                        points[static_cast<std::size_t>(p) * k + r];
      folded = dot(step, axis) < 0.0;
    }
    if (folded) crossings.push_back(p);
  }
  return crossings;
}

}  // namespace fiberseg
