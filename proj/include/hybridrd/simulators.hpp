#pragma once

#include <span>

#include <Eigen/Core>

#include "hybridrd/mesh.hpp"
#include "hybridrd/model.hpp"
#include "hybridrd/poisson_path.hpp"
#include "hybridrd/state.hpp"

namespace hybridrd {

/// Kernel step function: +1 on [mh, mh + h/2), -1 on [mh + h/2, (m+1)h).
int sigma_kernel(double t, double h);

/// Time derivative of the Macro block of `state` (|G2| x J): reaction flux on
/// the Macro rows plus deterministic transport, both carrying a factor eps.
Eigen::MatrixXd drift(const Model& model, const Mesh& mesh, const HybridState& state);

struct HybridOptions {
  /// Maximum classical RK4 step between events.
  double ode_step = 1e-2;
  /// Event localisation tolerance is event_tol * (1 + t).
  double event_tol = 1e-10;
};

struct SplitStepConfig {
  double h = 0.1;
  int ode_substeps = 8;
};

/// Exact scaled jump process: next-event simulation with one Poisson path per
/// channel, evaluated in operational time.
Trajectory simulate_exact(const Model& model, const Mesh& mesh, PathRegistry& registry,
                          const HybridState& init, std::span<const double> sample_times);

/// Piecewise-deterministic hybrid: Macro species follow `drift`, Meso-affecting
/// reactions and Meso transport jump when their integrated intensity reaches
/// the next arrival of their path.
Trajectory simulate_hybrid(const Model& model, const Mesh& mesh, PathRegistry& registry,
                           const HybridState& init, std::span<const double> sample_times,
                           const HybridOptions& options = {});

/// Split-step approximation of the hybrid: stochastic half-steps at doubled
/// rates with Macro frozen, alternating with deterministic half-steps at doubled
/// drift with Meso frozen. Sample times must be multiples of h/2.
Trajectory simulate_splitstep(const Model& model, const Mesh& mesh, PathRegistry& registry,
                              const HybridState& init, std::span<const double> sample_times,
                              const SplitStepConfig& cfg);

/// Total unscaled molecule count: sum of Meso counts plus sum of Macro values / eps.
double total_unscaled_count(const Model& model, const HybridState& state);

}  // namespace hybridrd
