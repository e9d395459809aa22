#pragma once

#include "rino/estimator.hpp"

#include <string>
#include <vector>

namespace rino {

/// TUM trajectory format: "timestamp tx ty tz qx qy qz qw" per line.
void write_tum(const std::vector<StampedPose>& poses, const std::string& path);
std::vector<StampedPose> read_tum(const std::string& path);

struct ErrorStats {
  double rmse = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;
  double max = 0.0;
  int count = 0;
};

struct EvalParams {
  double association_tolerance_s = 0.01;
  double rpe_segment_length_m = 10.0;
};

/// Absolute position error after aligning the first associated pose pair
/// (rigid transform taking the first estimate onto the first reference).
ErrorStats absolute_position_error(const std::vector<StampedPose>& estimate,
                                   const std::vector<StampedPose>& reference,
                                   const EvalParams& params = {});

/// Relative position error over non-overlapping segments of fixed
/// reference-trajectory arc length.
ErrorStats relative_position_error(const std::vector<StampedPose>& estimate,
                                   const std::vector<StampedPose>& reference,
                                   const EvalParams& params = {});

}  // namespace rino
