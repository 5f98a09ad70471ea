#include "hybridrd/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "hybridrd/format.hpp"
#include "hybridrd/mesh.hpp"
#include "hybridrd/poisson_path.hpp"
#include "hybridrd/simulators.hpp"

#ifndef HYBRIDRD_VERSION
#define HYBRIDRD_VERSION "0.0.0"
#endif

namespace hybridrd {

namespace fs = std::filesystem;

std::optional<Command> parse_command(std::string_view name) {
  if (name == "simulate") return Command::Simulate;
  if (name == "sweep-epsilon") return Command::SweepEpsilon;
  if (name == "sweep-h") return Command::SweepH;
  if (name == "validate-mesh") return Command::ValidateMesh;
  if (name == "predict-orders") return Command::PredictOrders;
  return std::nullopt;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Simulate:
      return "simulate";
    case Command::SweepEpsilon:
      return "sweep-epsilon";
    case Command::SweepH:
      return "sweep-h";
    case Command::ValidateMesh:
      return "validate-mesh";
    case Command::PredictOrders:
      return "predict-orders";
  }
  return "?";
}

std::string output_header(Command cmd, std::string_view config_text, std::uint64_t seed) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_text)));
  return std::string("# hybridrd ") + HYBRIDRD_VERSION + " command=" + to_string(cmd) +
         " config_fnv1a=" + hash + " seed=" + std::to_string(seed);
}

namespace {

const char* kSweepColumns = "axis_value,group,rms,rms_stderr,M,S2,N";

void estimate_row(std::ostream& os, const RmsEstimate& e) {
  os << format_double(e.rms) << ',' << format_double(e.rms_stderr) << ',' << format_double(e.M)
     << ',' << format_double(e.S2) << ',' << e.N << '\n';
}

std::string model_label(const RunConfig& cfg) {
  if (const auto* b = std::get_if<BuiltinName>(&cfg.model)) return to_string(*b);
  return "custom";
}

struct ConfigProblem {
  std::string what;
};

fs::path out_dir(const RunConfig& cfg, const CommandOptions& opt) {
  if (opt.out) return *opt.out;
  if (cfg.output) return *cfg.output;
  return ".";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw SimulationError("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw SimulationError("failed writing " + path.string());
}

fs::path prepare_dir(const RunConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = out_dir(cfg, opt);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw SimulationError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

double need(const std::optional<double>& v, const char* what) {
  if (!v) throw ConfigProblem{std::string("experiment.") + what + ": required for this command"};
  return *v;
}

SweepSettings settings_for(const RunConfig& cfg, const CommandOptions& opt, std::size_t default_n,
                           std::uint64_t seed) {
  const auto& ex = cfg.experiment;
  SweepSettings s;
  s.replicates = ex.replicates.value_or(default_n);
  s.final_time = ex.final_time.value_or(1.0);
  s.sample_dt = ex.sample_dt.value_or(0.0);
  s.seed = seed;
  s.threads = opt.threads.value_or(ex.threads.value_or(std::max(1u, std::thread::hardware_concurrency())));
  s.hybrid = ex.hybrid;
  s.ode_substeps = ex.ode_substeps;
  return s;
}

int finish_sweep(const SweepResult& result, const std::string& stem, const std::string& header,
                 const fs::path& dir, std::ostream& out, std::ostream& err) {
  std::ostringstream csv;
  csv << header << '\n';
  write_sweep_csv(csv, result);
  std::ostringstream series;
  series << header << '\n';
  write_series_csv(series, result);
  std::ostringstream summary;
  summary << header << '\n';
  write_sweep_summary(summary, result);
  write_file(dir / (stem + ".csv"), csv.str());
  write_file(dir / (stem + "_series.csv"), series.str());
  write_file(dir / (stem + "_summary.txt"), summary.str());
  out << summary.str();
  if (result.failure) {
    err << "error: sweep aborted: " << *result.failure << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

std::string species_name(const Model& m, bool macro, std::size_t row) {
  const auto idx = macro ? m.macro_species() : m.meso_species();
  return m.species[idx[row]].name;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << kSweepColumns << '\n';
  for (const auto& p : result.points)
    for (Group g : kGroups) {
      os << format_double(p.axis_value) << ',' << to_string(g) << ',';
      estimate_row(os, p.final[static_cast<std::size_t>(g)]);
    }
}

void write_series_csv(std::ostream& os, const SweepResult& result) {
  os << "axis_value,time,group,rms,rms_stderr,M,S2,N\n";
  for (const auto& p : result.points)
    for (std::size_t t = 0; t < p.series.size(); ++t)
      for (Group g : kGroups) {
        os << format_double(p.axis_value) << ',' << format_double(result.sample_times[t]) << ','
           << to_string(g) << ',';
        estimate_row(os, p.series[t][static_cast<std::size_t>(g)]);
      }
}

std::string format_orders(const OrderPrediction& p) {
  std::ostringstream os;
  os << "u = " << exponent_str(p.u) << '\n'
     << "v = " << exponent_str(p.v) << '\n'
     << "multiscale mse exponent (macro) = " << exponent_str(p.multiscale_macro) << '\n'
     << "multiscale mse exponent (meso) = " << exponent_str(p.multiscale_meso) << '\n'
     << "split-step mse eps exponent on h (meso) = " << exponent_str(p.splitstep_meso) << '\n'
     << "split-step mse eps exponent on h^2 (macro) = " << exponent_str(p.splitstep_macro) << '\n'
     << "applicable = " << to_string(p.applicable) << '\n';
  return os.str();
}

void write_sweep_summary(std::ostream& os, const SweepResult& result) {
  const bool eps = result.axis == Axis::Epsilon;
  os << "axis = " << (eps ? "epsilon" : "h") << '\n';
  os << format_orders(result.prediction);
  const auto predicted = predicted_rms_slopes(result.prediction, result.axis);
  for (Group g : kGroups) {
    const auto gi = static_cast<std::size_t>(g);
    os << "slope " << to_string(g) << " = ";
    if (const auto& f = result.slopes[gi])
      os << format_double(f->slope) << " +- " << format_double(f->stderr_) << " (" << f->points
         << " points)";
    else
      os << "n/a (" << result.slope_errors[gi] << ")";
    if (result.prediction.applicable == Applicability::None)
      os << ", predicted n/a (theory does not apply)\n";
    else
      os << ", predicted " << exponent_str(predicted[gi]) << '\n';
  }
  for (Group g : kGroups) {
    double mx = 0.0;
    for (const auto& p : result.points) mx = std::max(mx, p.max_squared[static_cast<std::size_t>(g)]);
    os << "max squared distance " << to_string(g) << " = " << format_double(mx) << '\n';
  }
  for (Group g : kGroups)
    if (const auto& f = result.slopes[static_cast<std::size_t>(g)])
      for (const auto& w : f->warnings) os << "warning: " << to_string(g) << ": " << w << '\n';
  if (result.failure) os << "failure: " << *result.failure << '\n';
}

int run_command(Command cmd, const RunConfig& cfg, const CommandOptions& opt, std::ostream& out,
                std::ostream& err) {
  const std::uint64_t seed = opt.seed.value_or(cfg.experiment.seed.value_or(1));
  const std::string header = output_header(cmd, opt.config_text, seed);
  const auto& ex = cfg.experiment;
  try {
    switch (cmd) {
      case Command::PredictOrders: {
        const Scenario sc = cfg.scenario(ex.epsilon.value_or(0.1));
        const auto e = effective_exponents(sc.model);
        const std::string text = format_orders(predict_orders(e.u, e.v));
        out << text;
        if (opt.out || cfg.output) write_file(prepare_dir(cfg, opt) / "orders.txt", header + "\n" + text);
        return kExitOk;
      }
      case Command::ValidateMesh: {
        const Scenario sc = cfg.scenario(ex.epsilon.value_or(0.1));
        sc.mesh.validate(sc.model.num_species());
        const std::string text = format_report(regularity_report(sc.mesh));
        out << text;
        if (opt.out || cfg.output)
          write_file(prepare_dir(cfg, opt) / "mesh_report.txt", header + "\n" + text);
        return kExitOk;
      }
      case Command::Simulate: {
        const double eps = need(ex.epsilon, "epsilon");
        const Scenario sc = cfg.scenario(eps);
        const double h = ex.h.value_or(0.1);
        std::vector<double> times{0.0};
        for (double t : sample_grid(ex.final_time.value_or(1.0), ex.sample_dt.value_or(0.1)))
          times.push_back(t);
        auto registry = derive_registry(seed, 0, sc.model, sc.mesh);
        const auto exact = simulate_exact(sc.model, sc.mesh, registry, sc.init, times);
        const auto hybrid = simulate_hybrid(sc.model, sc.mesh, registry, sc.init, times, ex.hybrid);
        const auto split = simulate_splitstep(sc.model, sc.mesh, registry, sc.init, times,
                                              SplitStepConfig{h, ex.ode_substeps});
        std::ostringstream csv;
        csv << header << '\n' << "simulator,time,species,voxel,value\n";
        const std::pair<const char*, const Trajectory*> runs[] = {
            {"exact", &exact}, {"hybrid", &hybrid}, {"splitstep", &split}};
        for (const auto& [name, tr] : runs)
          for (const auto& s : tr->states) {
            for (Eigen::Index r = 0; r < s.meso_counts.rows(); ++r)
              for (Eigen::Index j = 0; j < s.meso_counts.cols(); ++j)
                csv << name << ',' << format_double(s.time) << ','
                    << species_name(sc.model, false, static_cast<std::size_t>(r)) << ',' << j << ','
                    << s.meso_counts(r, j) << '\n';
            for (Eigen::Index r = 0; r < s.macro_values.rows(); ++r)
              for (Eigen::Index j = 0; j < s.macro_values.cols(); ++j)
                csv << name << ',' << format_double(s.time) << ','
                    << species_name(sc.model, true, static_cast<std::size_t>(r)) << ',' << j << ','
                    << format_double(s.macro_values(r, j)) << '\n';
          }
        const fs::path dir = prepare_dir(cfg, opt);
        write_file(dir / "trajectory.csv", csv.str());
        out << "model = " << model_label(cfg) << '\n'
            << "events exact = " << exact.event_count << '\n'
            << "events hybrid = " << hybrid.event_count << '\n'
            << "events splitstep = " << split.event_count << '\n'
            << "wrote " << (dir / "trajectory.csv").string() << '\n';
        return kExitOk;
      }
      case Command::SweepEpsilon: {
        if (ex.eps_grid.empty()) throw ConfigProblem{"experiment.eps_grid: required for sweep-epsilon"};
        const auto settings = settings_for(cfg, opt, 2000, seed);
        const auto result = sweep_epsilon([&](double e) { return cfg.scenario(e); }, ex.eps_grid, settings);
        return finish_sweep(result, "sweep_epsilon", header, prepare_dir(cfg, opt), out, err);
      }
      case Command::SweepH: {
        if (ex.h_grid.empty()) throw ConfigProblem{"experiment.h_grid: required for sweep-h"};
        const double eps = need(ex.epsilon, "epsilon");
        const auto settings = settings_for(cfg, opt, 5000, seed);
        const auto result = sweep_h(cfg.scenario(eps), ex.h_grid, settings);
        return finish_sweep(result, "sweep_h", header, prepare_dir(cfg, opt), out, err);
      }
    }
  } catch (const ConfigProblem& e) {
    err << "config error: " << e.what << '\n';
    return kExitConfig;
  } catch (const ContractViolation& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace hybridrd
