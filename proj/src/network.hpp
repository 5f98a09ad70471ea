#pragma once

// Channel tables, dependency lists and per-channel operational-time clocks
// shared by the three simulators.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hybridrd/mesh.hpp"
#include "hybridrd/model.hpp"
#include "hybridrd/poisson_path.hpp"

namespace hybridrd::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Channel {
  bool is_reaction = true;
  std::size_t index = 0;  // reaction r, or species i for transport
  std::size_t from = 0;   // voxel j
  std::size_t to = 0;     // destination voxel (transport only)
  double constant = 0.0;  // k_r, or eps^{-mu_i} * base hop rate
};

struct Entry {
  std::size_t species;
  std::size_t voxel;
  long delta;
};

/// Static description of all event channels, in PathRegistry order.
class Network {
public:
  Network(const Model& model, const Mesh& mesh);

  const Model& model() const { return *model_; }
  const Mesh& mesh() const { return *mesh_; }
  std::size_t num_species() const { return d_; }
  std::size_t num_voxels() const { return j_; }
  std::size_t size() const { return channels_.size(); }
  const Channel& channel(std::size_t c) const { return channels_[c]; }

  /// Rate of channel c on an unscaled count matrix (species x voxel).
  template <typename Matrix>
  double rate(std::size_t c, const Matrix& x) const {
    const Channel& ch = channels_[c];
    if (ch.is_reaction) {
      return evaluate_rate(model_->reactions[ch.index].rate_law, ch.constant,
                           x.col(static_cast<Eigen::Index>(ch.from)), volumes_[ch.from]);
    }
    const double n = static_cast<double>(
        x(static_cast<Eigen::Index>(ch.index), static_cast<Eigen::Index>(ch.from)));
    return n > 0.0 ? ch.constant * n : 0.0;
  }

  /// State entries changed by a jump of channel c; `meso_only` drops Macro rows.
  const std::vector<Entry>& changes(std::size_t c, bool meso_only) const {
    return meso_only ? changes_meso_[c] : changes_all_[c];
  }

  /// For each channel in `members`, the members whose rate reads an entry that
  /// the channel's jump changes, plus the channel itself. Indexed by channel.
  std::vector<std::vector<std::size_t>> dependencies(const std::vector<std::size_t>& members,
                                                     bool meso_only) const;

  /// Channels whose rates read entry (species, voxel).
  const std::vector<std::size_t>& readers(std::size_t species, std::size_t voxel) const {
    return readers_[species * j_ + voxel];
  }

  double volume(std::size_t j) const { return volumes_[j]; }

private:
  const Model* model_;
  const Mesh* mesh_;
  std::size_t d_;
  std::size_t j_;
  std::vector<double> volumes_;
  std::vector<Channel> channels_;
  std::vector<std::vector<std::size_t>> readers_;
  std::vector<std::vector<Entry>> changes_all_;
  std::vector<std::vector<Entry>> changes_meso_;

  std::vector<Entry> build_changes(std::size_t c, bool meso_only) const;
};

/// Binary min-heap over channel indices with decrease/increase-key.
class IndexedMinHeap {
public:
  explicit IndexedMinHeap(std::size_t capacity = 0) { reset(capacity); }

  void reset(std::size_t capacity) {
    heap_.clear();
    pos_.assign(capacity, npos);
    key_.assign(capacity, kInf);
  }
  bool empty() const { return heap_.empty(); }
  std::size_t top() const { return heap_.front(); }
  double top_key() const { return heap_.empty() ? kInf : key_[heap_.front()]; }

  void set(std::size_t id, double key) {
    if (pos_[id] == npos) {
      pos_[id] = heap_.size();
      heap_.push_back(id);
      key_[id] = key;
      sift_up(pos_[id]);
      return;
    }
    const double old = key_[id];
    key_[id] = key;
    if (key < old)
      sift_up(pos_[id]);
    else
      sift_down(pos_[id]);
  }

private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void swap_at(std::size_t a, std::size_t b) {
    std::swap(heap_[a], heap_[b]);
    pos_[heap_[a]] = a;
    pos_[heap_[b]] = b;
  }
  void sift_up(std::size_t i) {
    while (i > 0) {
      const std::size_t p = (i - 1) / 2;
      if (!(key_[heap_[i]] < key_[heap_[p]])) break;
      swap_at(i, p);
      i = p;
    }
  }
  void sift_down(std::size_t i) {
    const std::size_t n = heap_.size();
    for (;;) {
      const std::size_t l = 2 * i + 1;
      if (l >= n) break;
      std::size_t m = l;
      if (l + 1 < n && key_[heap_[l + 1]] < key_[heap_[l]]) m = l + 1;
      if (!(key_[heap_[m]] < key_[heap_[i]])) break;
      swap_at(i, m);
      i = m;
    }
  }

  std::vector<std::size_t> heap_;
  std::vector<std::size_t> pos_;
  std::vector<double> key_;
};

/// Operational-time clocks for a set of channels whose rates are constant
/// between the updates pushed through set_rate. A channel with internal time
/// `internal` at wall time `anchor` and rate `rate` fires when its internal time
/// reaches the next arrival of its path.
class ClockQueue {
public:
  ClockQueue(PathRegistry& registry, const std::vector<std::size_t>& members, double t0);

  double top_time() const { return heap_.top_key(); }
  std::size_t top() const { return heap_.top(); }

  /// Accumulate operational time up to t at the old rate, then switch rates.
  void set_rate(std::size_t c, double t, double rate) {
    Clock& k = clocks_[c];
    k.internal += k.rate * (t - k.anchor);
    k.anchor = t;
    k.rate = rate;
    heap_.set(c, firing_time(k));
  }

  /// Consume the pending arrival of c at wall time t. The caller follows up
  /// with set_rate for c and its dependents.
  void fire(std::size_t c, double t) {
    Clock& k = clocks_[c];
    k.internal = k.next_arrival;
    k.anchor = t;
    ++k.next_index;
    k.next_arrival = (*registry_)[c].arrival(k.next_index);
    heap_.set(c, firing_time(k));
  }

  double rate(std::size_t c) const { return clocks_[c].rate; }

private:
  struct Clock {
    double internal = 0.0;
    double anchor = 0.0;
    double rate = 0.0;
    double next_arrival = 0.0;
    std::size_t next_index = 0;
  };

  static double firing_time(const Clock& k) {
    if (!(k.rate > 0.0)) return kInf;
    const double remaining = k.next_arrival - k.internal;
    return k.anchor + (remaining > 0.0 ? remaining : 0.0) / k.rate;
  }

  PathRegistry* registry_;
  std::vector<Clock> clocks_;
  IndexedMinHeap heap_;
};

}  // namespace hybridrd::detail
