#include "fiberseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fiberseg/error.hpp"
#include "fiberseg/parallel.hpp"

namespace fiberseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Circular linear interpolation of per-ray radii at angle theta (radians).
double radius_at_angle(const BoundaryField& b, int p, double theta) {
  const double step = 2.0 * kPi / b.k;
  double t = theta / step;
  t -= std::floor(t / b.k) * b.k;
  const int r0 = static_cast<int>(t) % b.k;
  const int r1 = (r0 + 1) % b.k;
  const double frac = t - static_cast<int>(t);
  return (1.0 - frac) * b.at(p, r0) + frac * b.at(p, r1);
}

}  // namespace

BinaryMask voxelize(const BoundaryField& b, const std::vector<PlaneFrame>& frames,
                    const GridGeometry& ref) {
  if (static_cast<int>(frames.size()) != b.n) {
    throw InvalidParameterError("voxelize: frame count does not match field");
  }
  BinaryMask mask;
  mask.geom = ref;
  mask.data.assign(ref.voxel_count(), 0);

  const PlaneFrame& first = frames.front();
  const PlaneFrame& last = frames.back();
  const std::size_t nxy = static_cast<std::size_t>(ref.dims[0]) * ref.dims[1];

  parallel_for(ref.voxel_count(), [&](std::size_t idx) {
    const int iz = static_cast<int>(idx / nxy);
    const int iy = static_cast<int>((idx % nxy) / ref.dims[0]);
    const int ix = static_cast<int>(idx % ref.dims[0]);
    const Vec3 x = ref.voxel_center(ix, iy, iz);

    if (dot(x - first.origin, first.tangent) < 0.0) return;
    if (dot(x - last.origin, last.tangent) > 0.0) return;

    int best_p = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int p = 0; p < b.n; ++p) {
      const double d2 = norm2(x - frames[p].origin);
      if (d2 < best_d2) {
        best_d2 = d2;
        best_p = p;
      }
    }

    const Vec3 rel = x - frames[best_p].origin;
    const double pu = dot(rel, frames[best_p].u);
    const double pv = dot(rel, frames[best_p].v);
    const double rho = std::sqrt(pu * pu + pv * pv);
    const double theta = std::atan2(pv, pu);
    const double rmax = radius_at_angle(b, best_p, theta);
    if (rmax > 0.0 && rho <= rmax) mask.data[idx] = 1;
  });
  return mask;
}

BinaryMask crop_mask_between_planes(const BinaryMask& mask, const PlaneFrame& first,
                                    const PlaneFrame& last) {
  BinaryMask out = mask;
  const GridGeometry& g = mask.geom;
  const std::size_t nxy = static_cast<std::size_t>(g.dims[0]) * g.dims[1];
  parallel_for(g.voxel_count(), [&](std::size_t idx) {
    if (!out.data[idx]) return;
    const int iz = static_cast<int>(idx / nxy);
    const int iy = static_cast<int>((idx % nxy) / g.dims[0]);
    const int ix = static_cast<int>(idx % g.dims[0]);
    const Vec3 x = g.voxel_center(ix, iy, iz);
    if (dot(x - first.origin, first.tangent) < 0.0 || dot(x - last.origin, last.tangent) > 0.0) {
      out.data[idx] = 0;
    }
  });
  return out;
}

double dsc(const BinaryMask& a, const BinaryMask& b) {
  if (!(a.geom == b.geom)) throw IncompatibleMasksError("dsc: mask grids differ");
  std::size_t na = 0, nb = 0, ni = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    na += a.data[i] ? 1 : 0;
    nb += b.data[i] ? 1 : 0;
    ni += (a.data[i] && b.data[i]) ? 1 : 0;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(ni) / static_cast<double>(na + nb);
}

EvalReport aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EmptyReportError("aggregate: no records");
  EvalReport report;
  report.records = records;

  std::map<std::string, std::vector<double>> by_method;
  for (const auto& rec : records) by_method[rec.method].push_back(rec.dsc);

  for (auto& [method, values] : by_method) {
    std::sort(values.begin(), values.end());  // exact permutation invariance
    MethodAggregate agg;
    agg.method = method;
    agg.runs = static_cast<int>(values.size());
    double sum = 0.0;
    double min_v = values[0], max_v = values[0];
    for (double v : values) {
      sum += v;
      min_v = std::min(min_v, v);
      max_v = std::max(max_v, v);
    }
    const double mean = sum / values.size();
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= values.size();  // population formula
    agg.min_pct = 100.0 * min_v;
    agg.max_pct = 100.0 * max_v;
    agg.avg_pct = 100.0 * mean;
    agg.stddev_pct = 100.0 * std::sqrt(var);
    report.aggregates.push_back(std::move(agg));
  }
  return report;
}

void save_report_json(const EvalReport& report, const std::string& path) {
  nlohmann::json j;
  j["records"] = nlohmann::json::array();
  for (const auto& rec : report.records) {
    j["records"].push_back({{"config_id", rec.config_id}, {"method", rec.method},
                            {"dsc", rec.dsc}});
  }
  j["aggregates"] = nlohmann::json::array();
  for (const auto& agg : report.aggregates) {
    j["aggregates"].push_back({{"method", agg.method},
                               {"runs", agg.runs},
                               {"min_dsc_pct", agg.min_pct},
                               {"max_dsc_pct", agg.max_pct},
                               {"avg_dsc_pct", agg.avg_pct},
                               {"stddev_pct", agg.stddev_pct}});
  }
  j["stddev_formula"] = "population";
  std::ofstream out(path);
  if (!out) throw FileError("cannot write " + path);
  out << j.dump(2) << "\n";
}

void save_report_table(const EvalReport& report, const std::string& path) {
  std::ostringstream os;
  os << std::left << std::setw(22) << "metric";
  for (const auto& agg : report.aggregates) os << std::setw(22) << (agg.method + " approach");
  os << "\n";
  os << std::fixed << std::setprecision(3);
  auto row = [&](const std::string& label, auto getter) {
    os << std::left << std::setw(22) << label;
    for (const auto& agg : report.aggregates) os << std::setw(22) << getter(agg);
    os << "\n";
  };
  row("min DSC(%)", [](const MethodAggregate& a) { return a.min_pct; });
  row("max DSC(%)", [](const MethodAggregate& a) { return a.max_pct; });
  row("average DSC(%)", [](const MethodAggregate& a) { return a.avg_pct; });
  row("standard deviation", [](const MethodAggregate& a) { return a.stddev_pct; });
  std::ofstream out(path);
  if (!out) throw FileError("cannot write " + path);
  out << os.str();
}

}  // namespace fiberseg
