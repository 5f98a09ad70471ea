#pragma once

#include "hybridrd/mesh.hpp"
#include "hybridrd/model.hpp"
#include "hybridrd/state.hpp"

namespace hybridrd {

struct Scenario {
  Model model;
  Mesh mesh;
  HybridState init;
};

/// A (Meso, mobile) <-> B (Macro, immobile) on the 10-voxel unit ring.
/// A -> B at rate A, B -> A at rate eps * B.
Scenario builtin_isomerization(double epsilon);

enum class Orientation { Convergent, Divergent };

/// A + B -> C + B, C + D -> A + D, B -> D, D -> B on the 10-voxel unit ring.
/// Convergent: A, C Macro and B, D Meso. Divergent: the groups are swapped and
/// the bimolecular constants carry an extra eps^(1/4).
Scenario builtin_catalytic(double epsilon, Orientation orientation);

/// Lays out the standard initial data on the first J voxels: Meso species get
/// 10 (first half) / 20 (second half) molecules, Macro species 20/eps and
/// 10/eps (rounded to whole molecules, stored scaled).
HybridState standard_initial_state(const Model& model, std::size_t num_voxels);

}  // namespace hybridrd
