#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hybridrd/builtins.hpp"
#include "hybridrd/harness.hpp"
#include "hybridrd/model.hpp"

namespace hybridrd {

/// Every problem found in a config document, each as "<path>: <message>".
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

private:
  std::vector<std::string> issues_;
};

enum class BuiltinName { Isomerization, CatalyticConvergent, CatalyticDivergent };

/// Initial layout of one species: the standard 10/20 (Meso) or 20/eps, 10/eps
/// (Macro) halves, or explicit per-voxel values (Macro values are scaled and
/// are rounded to whole molecules for each eps).
using InitialLayout = std::variant<std::monostate, std::vector<double>>;

struct CustomModel {
  Model model;  // epsilon is filled in per run
  std::vector<InitialLayout> initial;
  std::size_t voxels = 10;
  double length = 1.0;
};

struct ExperimentConfig {
  std::optional<double> epsilon;
  std::vector<double> eps_grid;
  std::vector<double> h_grid;
  std::optional<double> h;
  std::optional<std::size_t> replicates;
  std::optional<double> final_time;
  std::optional<double> sample_dt;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  HybridOptions hybrid{};
  int ode_substeps = 8;
};

struct RunConfig {
  std::variant<BuiltinName, CustomModel> model;
  ExperimentConfig experiment;
  std::optional<std::string> output;

  /// Model, mesh and initial state at the given epsilon.
  Scenario scenario(double epsilon) const;
};

std::string to_string(BuiltinName b);

/// Parses and validates a JSON config. Throws ConfigError listing every issue.
RunConfig parse_config(std::string_view text);

}  // namespace hybridrd
