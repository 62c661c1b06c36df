#pragma once

#include <string>
#include <vector>

#include "fiberseg/ray_seg.hpp"

namespace fiberseg {

struct RunRecord {
  std::string config_id;
  std::string method;
  double dsc = 0.0;
};

struct MethodAggregate {
  std::string method;
  double min_pct = 0.0;
  double max_pct = 0.0;
  double avg_pct = 0.0;
  double stddev_pct = 0.0;  // population formula
  int runs = 0;
};

struct EvalReport {
  std::vector<RunRecord> records;
  std::vector<MethodAggregate> aggregates;
};

// Voxelization of a per-plane radial boundary onto the reference grid: every
// voxel center is assigned to its nearest plane origin (tie: lower index),
// rejected when beyond the end planes, and accepted when its in-plane radial
// distance is at most the circularly interpolated ray radius at its angle.
BinaryMask voxelize(const BoundaryField& b, const std::vector<PlaneFrame>& frames,
                    const GridGeometry& ref);

// Restriction of a mask to the slab between the first and last plane (used to
// cut the ground truth to the segmented extent).
BinaryMask crop_mask_between_planes(const BinaryMask& mask, const PlaneFrame& first,
                                    const PlaneFrame& last);

// Dice similarity coefficient. Both masks empty -> 1.
double dsc(const BinaryMask& a, const BinaryMask& b);

EvalReport aggregate(const std::vector<RunRecord>& records);

void save_report_json(const EvalReport& report, const std::string& path);
// Aligned text table with per-method min/max/average/standard deviation rows.
void save_report_table(const EvalReport& report, const std::string& path);

}  // namespace fiberseg
