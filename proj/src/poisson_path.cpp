#include "hybridrd/poisson_path.hpp"

#include <algorithm>
#include <cmath>

#include "hybridrd/errors.hpp"
#include "hybridrd/mesh.hpp"
#include "hybridrd/model.hpp"

namespace hybridrd {

PoissonPath::PoissonPath(std::uint64_t global_seed, std::uint64_t replicate,
                         ChannelId channel)
    : channel_(channel),
      seed_words_{static_cast<std::uint32_t>(global_seed & 0xffffffffU),
                  static_cast<std::uint32_t>(global_seed >> 32),
                  static_cast<std::uint32_t>(replicate & 0xffffffffU),
                  static_cast<std::uint32_t>(replicate >> 32),
                  static_cast<std::uint32_t>(channel.kind),
                  channel.a,
                  channel.b,
                  channel.c} {}

void PoissonPath::extend() {
  if (!engine_) {
    std::seed_seq seq(seed_words_.begin(), seed_words_.end());
    engine_.emplace(seq);
  }
  const std::uint64_t x = (*engine_)();
  const double u = (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
  const double last = arrivals_.empty() ? 0.0 : arrivals_.back();
  arrivals_.push_back(last - std::log(u));
}

std::size_t PoissonPath::count_up_to(double t) {
  require(std::isfinite(t) && t >= 0.0, "count_up_to: T must be finite and nonnegative");
  while (arrivals_.empty() || arrivals_.back() <= t) extend();
  return static_cast<std::size_t>(
      std::upper_bound(arrivals_.begin(), arrivals_.end(), t) - arrivals_.begin());
}

double PoissonPath::next_arrival_after(double t) {
  return arrival(count_up_to(t));
}

PathRegistry::PathRegistry(std::uint64_t global_seed, std::uint64_t replicate,
                           std::size_t num_reactions, std::size_t num_voxels,
                           const std::vector<std::size_t>& edges_per_species,
                           std::vector<ChannelId> transport_ids)
    : global_seed_(global_seed),
      replicate_(replicate),
      num_reactions_(num_reactions),
      num_voxels_(num_voxels) {
  paths_.reserve(num_reactions * num_voxels + transport_ids.size());
  for (std::size_t r = 0; r < num_reactions; ++r)
    for (std::size_t j = 0; j < num_voxels; ++j)
      paths_.emplace_back(global_seed, replicate, ChannelId::reaction(r, j));
  std::size_t offset = paths_.size();
  for (auto n : edges_per_species) {
    transport_offset_.push_back(offset);
    offset += n;
  }
  for (const auto& id : transport_ids) paths_.emplace_back(global_seed, replicate, id);
}

PoissonPath* PathRegistry::find(const ChannelId& id) {
  for (auto& p : paths_)
    if (p.channel() == id) return &p;
  return nullptr;
}

PathRegistry derive_registry(std::uint64_t global_seed, std::uint64_t replicate,
                             const Model& model, const Mesh& mesh) {
  std::vector<std::size_t> per_species;
  std::vector<ChannelId> ids;
  for (std::size_t i = 0; i < mesh.edges.size(); ++i) {
    per_species.push_back(mesh.edges[i].size());
    for (const auto& e : mesh.edges[i]) ids.push_back(ChannelId::transport(i, e.from, e.to));
  }
  return PathRegistry(global_seed, replicate, model.num_reactions(), mesh.num_voxels(),
                      per_species, std::move(ids));
}

}  // namespace hybridrd
