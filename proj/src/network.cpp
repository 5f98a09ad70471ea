#include "network.hpp"

#include <algorithm>

namespace hybridrd::detail {

Network::Network(const Model& model, const Mesh& mesh)
    : model_(&model),
      mesh_(&mesh),
      d_(model.num_species()),
      j_(mesh.num_voxels()),
      volumes_(mesh.voxel_volumes.data(), mesh.voxel_volumes.data() + mesh.voxel_volumes.size()),
      readers_(d_ * j_) {
  for (std::size_t r = 0; r < model.num_reactions(); ++r) {
    const double k = model.rate_constant(r);
    for (std::size_t j = 0; j < j_; ++j) channels_.push_back({true, r, j, j, k});
  }
  for (std::size_t i = 0; i < mesh.edges.size(); ++i) {
    const double scale = model.transport_scale(i);
    for (const auto& e : mesh.edges[i])
      channels_.push_back({false, i, e.from, e.to, scale * e.base_rate});
  }
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    const auto& ch = channels_[c];
    if (ch.is_reaction) {
      auto reads = model.reactions[ch.index].rate_law.reactants();
      std::sort(reads.begin(), reads.end());
      reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
      for (auto s : reads) readers_[s * j_ + ch.from].push_back(c);
    } else {
      readers_[ch.index * j_ + ch.from].push_back(c);
    }
  }
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    changes_all_.push_back(build_changes(c, false));
    changes_meso_.push_back(build_changes(c, true));
  }
}

std::vector<Entry> Network::build_changes(std::size_t c, bool meso_only) const {
  const auto& ch = channels_[c];
  std::vector<Entry> out;
  if (ch.is_reaction) {
    const auto& s = model_->reactions[ch.index].stoich;
    for (std::size_t i = 0; i < d_; ++i) {
      const int v = s[static_cast<Eigen::Index>(i)];
      if (v == 0 || (meso_only && model_->is_macro(i))) continue;
      out.push_back({i, ch.from, -static_cast<long>(v)});
    }
  } else if (!(meso_only && model_->is_macro(ch.index))) {
    out.push_back({ch.index, ch.from, -1});
    out.push_back({ch.index, ch.to, +1});
  }
  return out;
}

std::vector<std::vector<std::size_t>> Network::dependencies(
    const std::vector<std::size_t>& members, bool meso_only) const {
  std::vector<char> is_member(channels_.size(), 0);
  for (auto c : members) is_member[c] = 1;
  std::vector<std::vector<std::size_t>> deps(channels_.size());
  for (auto c : members) {
    auto& list = deps[c];
    list.push_back(c);
    for (const auto& e : changes(c, meso_only))
      for (auto a : readers(e.species, e.voxel))
        if (is_member[a]) list.push_back(a);
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return deps;
}

ClockQueue::ClockQueue(PathRegistry& registry, const std::vector<std::size_t>& members, double t0)
    : registry_(&registry), clocks_(registry.size()), heap_(registry.size()) {
  for (auto c : members) {
    Clock& k = clocks_[c];
    k.anchor = t0;
    k.next_arrival = registry[c].arrival(0);
    heap_.set(c, kInf);
  }
}

}  // namespace hybridrd::detail
