#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hybridrd/builtins.hpp"
#include "hybridrd/model.hpp"
#include "hybridrd/parallel.hpp"
#include "hybridrd/simulators.hpp"
#include "hybridrd/state.hpp"

namespace hybridrd {

enum class Group { Meso = 0, Macro = 1, All = 2 };
inline constexpr std::array<Group, 3> kGroups{Group::Meso, Group::Macro, Group::All};
std::string to_string(Group g);

double group_value(const SquaredDistance& d, Group g);

/// Which of the two distances a coupled replicate computes. The exact run is
/// only needed for the multiscale distance, the split-step run only for the
/// splitting distance.
struct CoupledRuns {
  bool multiscale = true;
  bool splitting = true;
};

/// Squared distances per sample time from one shared PathRegistry.
/// multiscale[t] = |X - Z|^2, splitting[t] = |Z - Y(h)|^2; a vector is empty
/// when the corresponding run was skipped.
struct CoupledSample {
  std::size_t replicate = 0;
  std::vector<SquaredDistance> multiscale;
  std::vector<SquaredDistance> splitting;
};

CoupledSample coupled_replicate(const Scenario& scenario, std::optional<SplitStepConfig> split,
                                std::uint64_t global_seed, std::size_t replicate,
                                std::span<const double> sample_times,
                                const HybridOptions& options = {}, CoupledRuns runs = {});

struct RmsEstimate {
  double M = 0.0;
  double S2 = 0.0;
  std::size_t N = 0;
  double rms = 0.0;
  double rms_stderr = 0.0;
};

/// Mean and unbiased dispersion of squared distances; needs N >= 2.
RmsEstimate rms_estimate(std::span<const double> squared);

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  std::size_t points = 0;
  std::vector<std::string> warnings;
};

/// Ordinary least squares of log_y on log_x. Non-finite points are dropped
/// with a warning; fewer than 3 remaining points is a ContractViolation.
SlopeFit fit_slope(std::span<const double> log_x, std::span<const double> log_y);

enum class Axis { Epsilon, StepH };

struct SweepPoint {
  double axis_value = 0.0;
  /// Estimates at the final sample time, indexed by Group.
  std::array<RmsEstimate, 3> final{};
  /// Estimates at every sample time: series[t][group].
  std::vector<std::array<RmsEstimate, 3>> series;
  /// Largest squared distance seen over replicates and sample times.
  std::array<double, 3> max_squared{};
};

struct SweepResult {
  Axis axis = Axis::Epsilon;
  std::vector<double> sample_times;
  std::vector<SweepPoint> points;
  /// Fitted log-log slope of the final-time RMS per group; empty with a note in
  /// slope_errors when the fit was impossible (e.g. the error is exactly zero).
  std::array<std::optional<SlopeFit>, 3> slopes;
  std::array<std::string, 3> slope_errors;
  OrderPrediction prediction;
  /// Set when a simulator failed; points then holds the completed grid prefix.
  std::optional<std::string> failure;
};

/// Predicted log-log RMS slope per group (half the mean-square exponent).
std::array<Exponent, 3> predicted_rms_slopes(const OrderPrediction& p, Axis axis);

struct SweepSettings {
  std::size_t replicates = 2000;
  double final_time = 1.0;
  /// Spacing of the output grid; 0 means the final time only.
  double sample_dt = 0.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  HybridOptions hybrid{};
  int ode_substeps = 8;
};

/// Output grid dt, 2dt, ..., final_time (or {final_time}).
std::vector<double> sample_grid(double final_time, double sample_dt);

using ScenarioFactory = std::function<Scenario(double epsilon)>;

/// |X - Z| at the final time for each eps in a strictly decreasing grid.
SweepResult sweep_epsilon(const ScenarioFactory& family, std::span<const double> eps_grid,
                          const SweepSettings& settings);

/// |Z - Y(h)| at the final time for each h in a strictly decreasing grid. The
/// hybrid run is shared by all h of a replicate.
SweepResult sweep_h(const Scenario& scenario, std::span<const double> h_grid,
                    const SweepSettings& settings);

/// Ensemble estimate of E[ max over sample times of |X(t)|_1^p ] from exact
/// trajectories, p in {1, 2, 3, 4}.
double moment_diagnostic(const Scenario& scenario, int p, std::size_t replicates,
                         std::span<const double> sample_times, std::uint64_t seed,
                         unsigned threads = 1);

}  // namespace hybridrd
