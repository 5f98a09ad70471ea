#include "hybridrd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hybridrd/errors.hpp"
#include "hybridrd/format.hpp"

namespace hybridrd {

void Mesh::validate(std::size_t num_species) const {
  const auto j_count = num_voxels();
  require(j_count >= 1, "mesh: no voxels");
  for (Eigen::Index j = 0; j < voxel_volumes.size(); ++j)
    require(voxel_volumes[j] > 0.0 && std::isfinite(voxel_volumes[j]),
            "mesh: voxel volumes must be positive");
  require(std::abs(voxel_volumes.sum() - total_volume) <= 1e-12 * total_volume,
          "mesh: total volume differs from the sum of voxel volumes");
  require(edges.size() == num_species, "mesh: edge lists do not match species count");
  for (const auto& list : edges) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : list) {
      require(e.from < j_count && e.to < j_count, "mesh: edge references unknown voxel");
      require(e.from != e.to, "mesh: self-edge");
      require(e.base_rate > 0.0 && std::isfinite(e.base_rate),
              "mesh: edge hop rates must be positive");
      require(seen.insert({e.from, e.to}).second, "mesh: duplicate edge");
    }
  }
  require(dimension >= 1, "mesh: dimension must be positive");
  if (voxel_diameters) {
    require(voxel_diameters->size() == voxel_volumes.size(),
            "mesh: diameter vector length differs from voxel count");
    require((voxel_diameters->array() > 0.0).all(), "mesh: diameters must be positive");
  }
}

Mesh make_mesh(Eigen::VectorXd volumes, std::vector<std::vector<Edge>> edges,
               int dimension) {
  Mesh mesh;
  mesh.total_volume = volumes.sum();
  mesh.voxel_volumes = std::move(volumes);
  mesh.edges = std::move(edges);
  mesh.dimension = dimension;
  mesh.validate(mesh.edges.size());
  return mesh;
}

Mesh periodic_1d_mesh(std::size_t num_voxels, double total_length,
                      std::span<const double> hop_rates) {
  require(num_voxels >= 2, "periodic_1d_mesh: need at least 2 voxels");
  require(total_length > 0.0 && std::isfinite(total_length),
          "periodic_1d_mesh: length must be positive");
  const double h = total_length / static_cast<double>(num_voxels);
  std::vector<std::vector<Edge>> edges(hop_rates.size());
  for (std::size_t i = 0; i < hop_rates.size(); ++i) {
    const double rate = hop_rates[i];
    require(rate >= 0.0 && std::isfinite(rate), "periodic_1d_mesh: negative hop rate");
    if (rate == 0.0) continue;
    // Ordered map keeps edge order canonical: by source, then target.
    std::map<std::pair<std::size_t, std::size_t>, double> merged;
    for (std::size_t j = 0; j < num_voxels; ++j) {
      merged[{j, (j + num_voxels - 1) % num_voxels}] += rate;
      merged[{j, (j + 1) % num_voxels}] += rate;
    }
    for (const auto& [key, q] : merged) edges[i].push_back({key.first, key.second, q});
  }
  Mesh mesh;
  mesh.voxel_volumes = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(num_voxels), h);
  mesh.total_volume = total_length;
  mesh.edges = std::move(edges);
  mesh.dimension = 1;
  mesh.voxel_diameters = mesh.voxel_volumes;
  return mesh;
}

RegularityReport regularity_report(const Mesh& mesh) {
  RegularityReport rep;
  rep.mean_volume = mesh.total_volume / static_cast<double>(mesh.num_voxels());
  rep.min_volume_ratio = mesh.voxel_volumes.minCoeff() / rep.mean_volume;
  rep.max_volume_ratio = mesh.voxel_volumes.maxCoeff() / rep.mean_volume;
  for (const auto& list : mesh.edges) {
    std::vector<std::size_t> degree(mesh.num_voxels(), 0);
    for (const auto& e : list) ++degree[e.from];
    if (!degree.empty())
      rep.max_out_degree = std::max(rep.max_out_degree, *std::max_element(degree.begin(), degree.end()));
  }
  if (mesh.voxel_diameters) {
    const double inv_d = 1.0 / static_cast<double>(mesh.dimension);
    const Eigen::ArrayXd ratio =
        mesh.voxel_diameters->array() / mesh.voxel_volumes.array().pow(inv_d);
    rep.min_shape_ratio = ratio.minCoeff();
    rep.max_shape_ratio = ratio.maxCoeff();
  }
  return rep;
}

std::string format_report(const RegularityReport& report) {
  std::string out;
  out += "mean_volume = " + format_double(report.mean_volume) + "\n";
  out += "m_V = " + format_double(report.min_volume_ratio) + "\n";
  out += "M_V = " + format_double(report.max_volume_ratio) + "\n";
  out += "M_D = " + std::to_string(report.max_out_degree) + "\n";
  out += "m_h = " + (report.min_shape_ratio ? format_double(*report.min_shape_ratio) : "absent") + "\n";
  out += "M_h = " + (report.max_shape_ratio ? format_double(*report.max_shape_ratio) : "absent") + "\n";
  return out;
}

}  // namespace hybridrd
