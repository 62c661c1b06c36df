#include "fiberseg/volume.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fiberseg/error.hpp"

namespace fiberseg {

namespace {

using nlohmann::json;

void write_header(const GridGeometry& g, int components, const std::string& path) {
  json h;
  h["dims"] = {g.dims[0], g.dims[1], g.dims[2]};
  h["spacing"] = {g.spacing.x, g.spacing.y, g.spacing.z};
  h["origin"] = {g.origin.x, g.origin.y, g.origin.z};
  h["dtype"] = "f32";
  h["components"] = components;
  h["order"] = "x-fastest";
  std::ofstream out(path + ".json");
  if (!out) throw FileError("cannot write " + path + ".json");
  out << h.dump(2) << "\n";
}

GridGeometry read_header(const std::string& path, int expected_components) {
  std::ifstream in(path + ".json");
  if (!in) throw FileError("cannot read " + path + ".json");
  json h;
  try {
    in >> h;
  } catch (const json::exception& e) {
    throw FileError("malformed header " + path + ".json: " + e.what());
  }
  if (h.value("dtype", "") != "f32" || h.value("order", "") != "x-fastest") {
    throw FileError("unsupported volume encoding in " + path + ".json");
  }
  if (h.value("components", -1) != expected_components) {
    throw FileError("unexpected component count in " + path + ".json");
  }
  GridGeometry g;
  for (int i = 0; i < 3; ++i) g.dims[i] = h.at("dims").at(i).get<int>();
  g.spacing = {h.at("spacing").at(0), h.at("spacing").at(1), h.at("spacing").at(2)};
  g.origin = {h.at("origin").at(0), h.at("origin").at(1), h.at("origin").at(2)};
  if (g.dims[0] <= 0 || g.dims[1] <= 0 || g.dims[2] <= 0 || g.spacing.x <= 0 ||
      g.spacing.y <= 0 || g.spacing.z <= 0) {
    throw FileError("invalid dims/spacing in " + path + ".json");
  }
  return g;
}

void write_raw(const std::vector<float>& values, const std::string& path) {
  std::ofstream out(path + ".raw", std::ios::binary);
  if (!out) throw FileError("cannot write " + path + ".raw");
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out) throw FileError("short write to " + path + ".raw");
}

std::vector<float> read_raw(const std::string& path, std::size_t expected) {
  std::ifstream in(path + ".raw", std::ios::binary);
  if (!in) throw FileError("cannot read " + path + ".raw");
  std::vector<float> values(expected);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(expected * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != expected * sizeof(float)) {
    throw FileError("truncated payload in " + path + ".raw");
  }
  return values;
}

}  // namespace

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), uint8_t{1}));
}

bool in_bounds(const GridGeometry& g, const Vec3& p) {
  const double fx = (p.x - g.origin.x) / g.spacing.x;
  const double fy = (p.y - g.origin.y) / g.spacing.y;
  const double fz = (p.z - g.origin.z) / g.spacing.z;
  return fx >= 0.0 && fx <= g.dims[0] - 1 && fy >= 0.0 && fy <= g.dims[1] - 1 &&
         fz >= 0.0 && fz <= g.dims[2] - 1;
}

std::optional<DiffusionTensor> try_sample_tensor(const TensorVolume& vol, const Vec3& p) {
  const GridGeometry& g = vol.geom;
  if (!in_bounds(g, p)) return std::nullopt;
  const double fx = (p.x - g.origin.x) / g.spacing.x;
  const double fy = (p.y - g.origin.y) / g.spacing.y;
  const double fz = (p.z - g.origin.z) / g.spacing.z;
  const int ix = std::min(static_cast<int>(fx), g.dims[0] - 2 >= 0 ? g.dims[0] - 2 : 0);
  const int iy = std::min(static_cast<int>(fy), g.dims[1] - 2 >= 0 ? g.dims[1] - 2 : 0);
  const int iz = std::min(static_cast<int>(fz), g.dims[2] - 2 >= 0 ? g.dims[2] - 2 : 0);
  const double tx = fx - ix;
  const double ty = fy - iy;
  const double tz = fz - iz;

  DiffusionTensor acc;
  for (int dz = 0; dz < 2; ++dz) {
    const int z = std::min(iz + dz, g.dims[2] - 1);
    const double wz = dz ? tz : 1.0 - tz;
    for (int dy = 0; dy < 2; ++dy) {
      const int y = std::min(iy + dy, g.dims[1] - 1);
      const double wy = dy ? ty : 1.0 - ty;
      for (int dx = 0; dx < 2; ++dx) {
        const int x = std::min(ix + dx, g.dims[0] - 1);
        const double w = wz * wy * (dx ? tx : 1.0 - tx);
        if (w == 0.0) continue;
        acc = acc + w * vol.at(x, y, z);
      }
    }
  }
  return acc;
}

DiffusionTensor sample_tensor(const TensorVolume& vol, const Vec3& p) {
  auto t = try_sample_tensor(vol, p);
  if (!t) throw OutOfBoundsError("sample_tensor: point outside volume");
  return *t;
}

void save_tensor_volume(const TensorVolume& vol, const std::string& path) {
  write_header(vol.geom, 6, path);
  std::vector<float> values;
  values.reserve(vol.data.size() * 6);
  for (const auto& t : vol.data) {
    values.push_back(static_cast<float>(t.dxx));
    values.push_back(static_cast<float>(t.dyy));
    values.push_back(static_cast<float>(t.dzz));
    values.push_back(static_cast<float>(t.dxy));
    values.push_back(static_cast<float>(t.dxz));
    values.push_back(static_cast<float>(t.dyz));
  }
  write_raw(values, path);
}

TensorVolume load_tensor_volume(const std::string& path) {
  TensorVolume vol;
  vol.geom = read_header(path, 6);
  const auto values = read_raw(path, vol.geom.voxel_count() * 6);
  vol.data.resize(vol.geom.voxel_count());
  for (std::size_t i = 0; i < vol.data.size(); ++i) {
    const float* v = &values[i * 6];
    vol.data[i] = {v[0], v[1], v[2], v[3], v[4], v[5]};
  }
  return vol;
}

void save_mask(const BinaryMask& mask, const std::string& path) {
  write_header(mask.geom, 1, path);
  std::vector<float> values(mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i) values[i] = mask.data[i] ? 1.0f : 0.0f;
  write_raw(values, path);
}

BinaryMask load_mask(const std::string& path) {
  BinaryMask mask;
  mask.geom = read_header(path, 1);
  const auto values = read_raw(path, mask.geom.voxel_count());
  mask.data.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) mask.data[i] = values[i] != 0.0f ? 1 : 0;
  return mask;
}

void save_scalar_field(const GridGeometry& geom, int components,
                       const std::vector<float>& values, const std::string& path) {
  if (values.size() != geom.voxel_count() * static_cast<std::size_t>(components)) {
    throw FileError("scalar field size does not match geometry");
  }
  write_header(geom, components, path);
  write_raw(values, path);
}

}  // namespace fiberseg
