#include "fiberseg/raygrid.hpp"

#include <cmath>

#include "fiberseg/error.hpp"
#include "fiberseg/parallel.hpp"

namespace fiberseg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Vec3 EvalGrid::ray_direction(int p, int r) const {
  const double phi = 2.0 * kPi * r / params.k;
  return std::cos(phi) * frames[p].u + std::sin(phi) * frames[p].v;
}

int window_size(const Vec3& voxel_spacing, double d) {
  if (d <= 0.0) throw InvalidParameterError("window_size: d must be > 0");
  const double diag = norm(voxel_spacing);
  const int r = static_cast<int>(std::ceil(diag / d));
  return r < 1 ? 1 : r;
}

EvalGrid build_grid(const TensorVolume& vol, const std::vector<PlaneFrame>& frames,
                    const GridParams& gp) {
  if (gp.n < 2 || gp.k < 3 || gp.m < 2 || gp.d <= 0.0) {
    throw InvalidParameterError("build_grid: invalid grid parameters");
  }
  if (static_cast<int>(frames.size()) != gp.n) {
    throw InvalidGridError("build_grid: frame count does not match n");
  }

  EvalGrid grid;
  grid.params = gp;
  grid.frames = frames;
  grid.points.resize(static_cast<std::size_t>(gp.n) * gp.k * gp.m);

  // Principal direction at each plane origin; the alpha_c reference and the
  // alpha_n predecessor for depth 0.
  std::vector<Vec3> center_dirs(gp.n);
  for (int p = 0; p < gp.n; ++p) {
    const auto t = try_sample_tensor(vol, frames[p].origin);
    if (!t) throw InvalidGridError("build_grid: plane origin outside volume");
    center_dirs[p] = principal_direction(*t);
  }

  parallel_for(static_cast<std::size_t>(gp.n) * gp.k, [&](std::size_t col) {
    const int p = static_cast<int>(col / gp.k);
    const int r = static_cast<int>(col % gp.k);
    const Vec3 dir = grid.ray_direction(p, r);
    Vec3 prev_dir = center_dirs[p];
    bool prev_valid = true;
    for (int j = 0; j < gp.m; ++j) {
      EvalPoint pt;
      pt.position = frames[p].origin + ((j + 1) * gp.d) * dir;
      const auto tensor = try_sample_tensor(vol, pt.position);
      if (tensor) {
        const EigenSystem es = eigendecompose(*tensor);
        pt.in_bounds = true;
        pt.fa = fractional_anisotropy(es.lambda1, es.lambda2, es.lambda3);
        pt.alpha_c = angle_between_principal(es.e1, center_dirs[p]);
        pt.alpha_n = prev_valid ? angle_between_principal(es.e1, prev_dir) : 90.0;
        prev_dir = es.e1;
        prev_valid = true;
      } else {
        pt.in_bounds = false;
        pt.fa = 0.0;
        pt.alpha_c = 90.0;
        pt.alpha_n = 90.0;
        prev_valid = false;
      }
      grid.points[grid.index(p, r, j)] = pt;
    }
  });
  return grid;
}

void save_grid_attributes(const EvalGrid& grid, const std::string& path) {
  GridGeometry geom;
  geom.dims = {grid.params.m, grid.params.k, grid.params.n};
  geom.spacing = {grid.params.d, 1.0, 1.0};
  geom.origin = {0.0, 0.0, 0.0};
  std::vector<float> values;
  values.reserve(grid.points.size() * 3);
  for (int p = 0; p < grid.params.n; ++p) {
    for (int r = 0; r < grid.params.k; ++r) {
      for (int j = 0; j < grid.params.m; ++j) {
        const EvalPoint& pt = grid.at(p, r, j);
        values.push_back(static_cast<float>(pt.fa));
        values.push_back(static_cast<float>(pt.alpha_c));
        values.push_back(static_cast<float>(pt.alpha_n));
      }
    }
  }
  save_scalar_field(geom, 3, values, path);
}

}  // namespace fiberseg
