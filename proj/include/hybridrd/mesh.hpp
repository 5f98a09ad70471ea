#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hybridrd {

/// Directed transport edge: one molecule hops from -> to at rate
/// base_rate (before epsilon scaling) per molecule.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  double base_rate = 0.0;
};

struct Mesh {
  Eigen::VectorXd voxel_volumes;
  double total_volume = 0.0;
  /// edges[i] lists the directed edges along which species i moves.
  std::vector<std::vector<Edge>> edges;
  int dimension = 1;
  std::optional<Eigen::VectorXd> voxel_diameters;

  std::size_t num_voxels() const { return static_cast<std::size_t>(voxel_volumes.size()); }
  double volume(std::size_t j) const { return voxel_volumes[static_cast<Eigen::Index>(j)]; }

  /// Throws ContractViolation if volumes, totals or edges are inconsistent
  /// with `num_species` species.
  void validate(std::size_t num_species) const;
};

/// Builds a mesh from explicit volumes and per-species edge lists.
Mesh make_mesh(Eigen::VectorXd volumes, std::vector<std::vector<Edge>> edges,
               int dimension = 1);

/// J equal voxels on a ring of the given length. Species i hops to each
/// neighbour at hop_rates[i]; species with rate 0 get no edges. For J = 2
/// both neighbours coincide and the two edges merge into one of double rate.
Mesh periodic_1d_mesh(std::size_t num_voxels, double total_length,
                      std::span<const double> hop_rates);

struct RegularityReport {
  double mean_volume = 0.0;
  double min_volume_ratio = 0.0;  // m_V
  double max_volume_ratio = 0.0;  // M_V
  std::size_t max_out_degree = 0; // M_D
  std::optional<double> min_shape_ratio;  // m_h
  std::optional<double> max_shape_ratio;  // M_h
};

RegularityReport regularity_report(const Mesh& mesh);

std::string format_report(const RegularityReport& report);

}  // namespace hybridrd
