#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace hybridrd {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Mixed state on J voxels: integer counts for the Meso species (|G1| x J)
/// and scaled values eps * count for the Macro species (|G2| x J). Rows follow
/// model species order within each group.
struct HybridState {
  CountMatrix meso_counts;
  Eigen::MatrixXd macro_values;
  double time = 0.0;

  friend bool operator==(const HybridState& a, const HybridState& b) {
    return a.time == b.time && a.meso_counts == b.meso_counts &&
           a.macro_values == b.macro_values;
  }
};

struct Trajectory {
  std::vector<double> sample_times;
  std::vector<HybridState> states;
  std::size_t event_count = 0;
};

/// Squared Euclidean distances between two states, split by group.
struct SquaredDistance {
  double meso = 0.0;
  double macro = 0.0;
  double all() const { return meso + macro; }
};

inline SquaredDistance squared_distance(const HybridState& a, const HybridState& b) {
  SquaredDistance d;
  d.meso = (a.meso_counts - b.meso_counts).cast<double>().squaredNorm();
  d.macro = (a.macro_values - b.macro_values).squaredNorm();
  return d;
}

}  // namespace hybridrd
