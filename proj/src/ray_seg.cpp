#include "fiberseg/ray_seg.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "fiberseg/error.hpp"
#include "fiberseg/parallel.hpp"

namespace fiberseg {

namespace {

double median_of(std::vector<double>& w) {
  std::sort(w.begin(), w.end());
  const std::size_t s = w.size();
  return s % 2 ? w[s / 2] : 0.5 * (w[s / 2 - 1] + w[s / 2]);
}

double clamp_to_median(double value, double med, double max_ratio) {
  if (value > med * max_ratio || value < med / max_ratio) return med;
  return value;
}

}  // namespace

BoundaryField detect_boundary(const EvalGrid& grid, const RayThresholds& th) {
  if (th.r < 1) throw InvalidParameterError("detect_boundary: window size must be >= 1");
  const GridParams& gp = grid.params;

  BoundaryField b;
  b.n = gp.n;
  b.k = gp.k;
  b.d = gp.d;
  b.provenance = "ray";
  b.radius.assign(static_cast<std::size_t>(gp.n) * gp.k, 0.0);
  b.saturated.assign(b.radius.size(), 0);

  parallel_for(b.radius.size(), [&](std::size_t col) {
    const int p = static_cast<int>(col) / gp.k;
    const int r = static_cast<int>(col) % gp.k;

    auto passes = [&](int j) {
      const EvalPoint& pt = grid.at(p, r, j);
      return pt.fa >= th.t_fa && pt.alpha_c <= th.t_alpha_c && pt.alpha_n <= th.t_alpha_n;
    };

    int boundary = -1;
    int fail_run = 0;  // failing points ending at the current j
    for (int j = 0; j < gp.m; ++j) {
      fail_run = passes(j) ? 0 : fail_run + 1;
      const int window = std::min(j, th.r) + 1;
      if (fail_run >= window) {
        boundary = j - window + 1;
        break;
      }
    }
    if (boundary < 0) {
      b.radius[col] = gp.m * gp.d;
      b.saturated[col] = 1;
    } else {
      b.radius[col] = boundary * gp.d;
    }
  });
  return b;
}

BoundaryField in_plane_correction(const BoundaryField& b, double max_ratio) {
  if (max_ratio <= 1.0) throw InvalidParameterError("in_plane_correction: max_ratio must be > 1");
  BoundaryField out = b;
  parallel_for(static_cast<std::size_t>(b.n) * b.k, [&](std::size_t idx) {
    const int p = static_cast<int>(idx) / b.k;
    const int r = static_cast<int>(idx) % b.k;
    std::vector<double> window;
    window.reserve(5);
    for (int o = -2; o <= 2; ++o) {
      window.push_back(b.at(p, ((r + o) % b.k + b.k) % b.k));
    }
    out.at(p, r) = clamp_to_median(b.at(p, r), median_of(window), max_ratio);
  });
  return out;
}

BoundaryField intra_plane_correction(const BoundaryField& b, double max_ratio) {
  if (max_ratio <= 1.0) {
    throw InvalidParameterError("intra_plane_correction: max_ratio must be > 1");
  }
  BoundaryField out = b;
  parallel_for(static_cast<std::size_t>(b.n) * b.k, [&](std::size_t idx) {
    const int p = static_cast<int>(idx) / b.k;
    const int r = static_cast<int>(idx) % b.k;
    std::vector<double> window;
    window.reserve(5);
    for (int q = std::max(0, p - 2); q <= std::min(b.n - 1, p + 2); ++q) {
      window.push_back(b.at(q, r));
    }
    out.at(p, r) = clamp_to_median(b.at(p, r), median_of(window), max_ratio);
  });
  return out;
}

void save_boundary_field(const BoundaryField& b, const std::string& path) {
  nlohmann::json j;
  j["n"] = b.n;
  j["k"] = b.k;
  j["d"] = b.d;
  j["radii"] = b.radius;
  j["saturated"] = b.saturated;
  j["provenance"] = b.provenance;
  std::ofstream out(path);
  if (!out) throw FileError("cannot write " + path);
  out << j.dump() << "\n";
}

BoundaryField load_boundary_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FileError("malformed boundary field " + path + ": " + e.what());
  }
  BoundaryField b;
  b.n = j.at("n");
  b.k = j.at("k");
  b.d = j.at("d");
  b.radius = j.at("radii").get<std::vector<double>>();
  if (j.contains("saturated")) b.saturated = j.at("saturated").get<std::vector<uint8_t>>();
  b.saturated.resize(b.radius.size(), 0);
  b.provenance = j.value("provenance", "");
  if (b.radius.size() != static_cast<std::size_t>(b.n) * b.k) {
    throw FileError("boundary field size mismatch in " + path);
  }
  return b;
}

}  // namespace fiberseg
