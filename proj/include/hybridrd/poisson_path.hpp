#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace hybridrd {

struct Model;
struct Mesh;

/// Event channel addressed by a Poisson path: reaction r in voxel j, or a
/// hop of species i from voxel j to voxel k.
struct ChannelId {
  enum class Kind : std::uint32_t { Reaction = 0, Transport = 1 };
  Kind kind = Kind::Reaction;
  std::uint32_t a = 0;  // reaction r | species i
  std::uint32_t b = 0;  // voxel j    | from j
  std::uint32_t c = 0;  // unused     | to k

  static ChannelId reaction(std::size_t r, std::size_t j) {
    return {Kind::Reaction, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(j), 0};
  }
  static ChannelId transport(std::size_t i, std::size_t j, std::size_t k) {
    return {Kind::Transport, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
            static_cast<std::uint32_t>(k)};
  }
  friend bool operator==(const ChannelId&, const ChannelId&) = default;
};

/// Unit-rate Poisson arrival stream for one channel. Arrivals are generated
/// lazily from a dedicated mt19937_64 seeded from (global seed, replicate,
/// channel) and cached append-only, so any earlier query can be replayed.
///
/// Seed words (32-bit, in order) fed to std::seed_seq:
///   seed & 0xffffffff, seed >> 32, replicate & 0xffffffff, replicate >> 32,
///   kind, a, b, c
/// Each gap is -log(u) with u = ((x >> 11) + 0.5) * 2^-53, x the next engine output.
class PoissonPath {
public:
  PoissonPath(std::uint64_t global_seed, std::uint64_t replicate, ChannelId channel);

  const ChannelId& channel() const { return channel_; }

  /// n-th arrival time (n = 0 is the first arrival).
  double arrival(std::size_t n) {
    while (arrivals_.size() <= n) extend();
    return arrivals_[n];
  }

  /// Number of arrivals in (0, T].
  std::size_t count_up_to(double t);
  /// Smallest arrival strictly greater than T.
  double next_arrival_after(double t);

  std::size_t cached() const { return arrivals_.size(); }

private:
  void extend();

  ChannelId channel_;
  std::array<std::uint32_t, 8> seed_words_{};
  std::optional<std::mt19937_64> engine_;
  std::vector<double> arrivals_;
};

/// One replicate's paths for every channel of a model on a mesh.
/// Reaction channels come first (index r * J + j), followed by transport
/// channels in species order, each species following its mesh edge order.
class PathRegistry {
public:
  PathRegistry(std::uint64_t global_seed, std::uint64_t replicate, std::size_t num_reactions,
               std::size_t num_voxels, const std::vector<std::size_t>& edges_per_species,
               std::vector<ChannelId> transport_ids);

  std::size_t size() const { return paths_.size(); }
  std::size_t num_reaction_channels() const { return num_reactions_ * num_voxels_; }

  std::size_t reaction_index(std::size_t r, std::size_t j) const { return r * num_voxels_ + j; }
  std::size_t transport_index(std::size_t species, std::size_t edge) const {
    return transport_offset_[species] + edge;
  }

  PoissonPath& operator[](std::size_t index) { return paths_[index]; }
  const PoissonPath& operator[](std::size_t index) const { return paths_[index]; }

  /// Linear lookup by channel id; nullptr if absent.
  PoissonPath* find(const ChannelId& id);

  std::uint64_t global_seed() const { return global_seed_; }
  std::uint64_t replicate() const { return replicate_; }

private:
  std::uint64_t global_seed_;
  std::uint64_t replicate_;
  std::size_t num_reactions_;
  std::size_t num_voxels_;
  std::vector<std::size_t> transport_offset_;
  std::vector<PoissonPath> paths_;
};

PathRegistry derive_registry(std::uint64_t global_seed, std::uint64_t replicate,
                             const Model& model, const Mesh& mesh);

}  // namespace hybridrd
