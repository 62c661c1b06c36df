#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fiberseg/tensor.hpp"
#include "fiberseg/vec3.hpp"

namespace fiberseg {

// Shared grid geometry for volumes and masks. Voxel (ix,iy,iz) is centered at
// origin + (ix*sx, iy*sy, iz*sz); data is stored x-fastest.
struct GridGeometry {
  std::array<int, 3> dims = {0, 0, 0};
  Vec3 spacing = {1.0, 1.0, 1.0};
  Vec3 origin = {0.0, 0.0, 0.0};

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * dims[1] + iy) * dims[0] + ix;
  }
  Vec3 voxel_center(int ix, int iy, int iz) const {
    return {origin.x + ix * spacing.x, origin.y + iy * spacing.y, origin.z + iz * spacing.z};
  }
  bool operator==(const GridGeometry& o) const = default;
};

struct TensorVolume {
  GridGeometry geom;
  std::vector<DiffusionTensor> data;

  const DiffusionTensor& at(int ix, int iy, int iz) const { return data[geom.index(ix, iy, iz)]; }
  DiffusionTensor& at(int ix, int iy, int iz) { return data[geom.index(ix, iy, iz)]; }
};

struct BinaryMask {
  GridGeometry geom;
  std::vector<uint8_t> data;

  bool at(int ix, int iy, int iz) const { return data[geom.index(ix, iy, iz)] != 0; }
  void set(int ix, int iy, int iz, bool v) { data[geom.index(ix, iy, iz)] = v ? 1 : 0; }
  std::size_t count() const;
};

// True when p lies inside the box spanned by the outermost voxel centers.
bool in_bounds(const GridGeometry& g, const Vec3& p);

// Component-wise trilinear interpolation of the six tensor components.
// Returns nullopt when p is out of bounds.
std::optional<DiffusionTensor> try_sample_tensor(const TensorVolume& vol, const Vec3& p);

// Throwing variant; OutOfBoundsError when p is outside the valid region.
DiffusionTensor sample_tensor(const TensorVolume& vol, const Vec3& p);

// Volume file format: <path>.json header + <path>.raw little-endian f32
// payload, components interleaved per voxel (dxx,dyy,dzz,dxy,dxz,dyz for
// tensors, one component for masks). `path` is the stem without extension.
void save_tensor_volume(const TensorVolume& vol, const std::string& path);
TensorVolume load_tensor_volume(const std::string& path);

void save_mask(const BinaryMask& mask, const std::string& path);
BinaryMask load_mask(const std::string& path);

// Generic multi-component scalar dump on the same format (grid diagnostics).
void save_scalar_field(const GridGeometry& geom, int components,
                       const std::vector<float>& values, const std::string& path);

}  // namespace fiberseg
