#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "hybridrd/config.hpp"
#include "hybridrd/harness.hpp"

namespace hybridrd {

enum class Command { Simulate, SweepEpsilon, SweepH, ValidateMesh, PredictOrders };

std::optional<Command> parse_command(std::string_view name);
std::string to_string(Command c);

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  /// Raw config text, hashed into output headers.
  std::string config_text;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one command. Reports go to `out`, diagnostics to `err`; files are
/// written below the output directory. Returns the process exit status.
int run_command(Command cmd, const RunConfig& config, const CommandOptions& options,
                std::ostream& out, std::ostream& err);

/// "# hybridrd <version> command=<cmd> config_fnv1a=<hex> seed=<seed>"
std::string output_header(Command cmd, std::string_view config_text, std::uint64_t seed);

/// Sweep CSV: header row then one row per (grid point, group) at the final time.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// Per-sample-time companion of write_sweep_csv.
void write_series_csv(std::ostream& os, const SweepResult& result);
void write_sweep_summary(std::ostream& os, const SweepResult& result);

std::string format_orders(const OrderPrediction& p);

}  // namespace hybridrd
