#include "hybridrd/harness.hpp"

#include <cmath>
#include <stdexcept>

#include "hybridrd/errors.hpp"
#include "hybridrd/poisson_path.hpp"

namespace hybridrd {

std::string to_string(Group g) {
  switch (g) {
    case Group::Meso:
      return "meso";
    case Group::Macro:
      return "macro";
    case Group::All:
      return "all";
  }
  return "?";
}

double group_value(const SquaredDistance& d, Group g) {
  switch (g) {
    case Group::Meso:
      return d.meso;
    case Group::Macro:
      return d.macro;
    case Group::All:
      return d.all();
  }
  return 0.0;
}

namespace {

std::vector<SquaredDistance> distances(const Trajectory& a, const Trajectory& b) {
  std::vector<SquaredDistance> out;
  out.reserve(a.states.size());
  for (std::size_t t = 0; t < a.states.size(); ++t)
    out.push_back(squared_distance(a.states[t], b.states[t]));
  return out;
}

template <typename F>
auto annotate(std::size_t replicate, F&& body) {
  try {
    return body();
  } catch (const SimulationError& e) {
    throw SimulationError("replicate " + std::to_string(replicate) + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ContractViolation("replicate " + std::to_string(replicate) + ": " + e.what());
  }
}

void check_grid(std::span<const double> grid, const char* what) {
  require(grid.size() >= 3, std::string(what) + ": need at least 3 grid points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(std::isfinite(grid[i]) && grid[i] > 0.0, std::string(what) + ": grid values must be positive");
    if (i > 0) require(grid[i] < grid[i - 1], std::string(what) + ": grid must be decreasing");
  }
}

void check_settings(const SweepSettings& s) {
  require(s.replicates >= 2, "sweep: need at least 2 replicates");
  require(std::isfinite(s.final_time) && s.final_time > 0.0, "sweep: final_time must be positive");
}

SweepPoint aggregate(double axis_value, std::size_t times,
                     const std::vector<std::vector<SquaredDistance>>& per_replicate) {
  SweepPoint pt;
  pt.axis_value = axis_value;
  pt.series.resize(times);
  std::vector<double> buf(per_replicate.size());
  for (Group g : kGroups) {
    const auto gi = static_cast<std::size_t>(g);
    for (std::size_t t = 0; t < times; ++t) {
      for (std::size_t n = 0; n < per_replicate.size(); ++n) {
        buf[n] = group_value(per_replicate[n][t], g);
        pt.max_squared[gi] = std::max(pt.max_squared[gi], buf[n]);
      }
      pt.series[t][gi] = rms_estimate(buf);
    }
    pt.final[gi] = pt.series.back()[gi];
  }
  return pt;
}

void fit_all(SweepResult& result) {
  std::vector<double> lx;
  for (const auto& p : result.points) lx.push_back(std::log(p.axis_value));
  for (Group g : kGroups) {
    const auto gi = static_cast<std::size_t>(g);
    std::vector<double> ly;
    for (const auto& p : result.points) ly.push_back(std::log(p.final[gi].rms));
    try {
      result.slopes[gi] = fit_slope(lx, ly);
    } catch (const ContractViolation& e) {
      result.slope_errors[gi] = e.what();
    }
  }
}

}  // namespace

CoupledSample coupled_replicate(const Scenario& scenario, std::optional<SplitStepConfig> split,
                                std::uint64_t global_seed, std::size_t replicate,
                                std::span<const double> sample_times,
                                const HybridOptions& options, CoupledRuns runs) {
  require(!runs.splitting || split.has_value(), "coupled_replicate: splitting needs a step h");
  return annotate(replicate, [&] {
    auto registry = derive_registry(global_seed, replicate, scenario.model, scenario.mesh);
    CoupledSample out;
    out.replicate = replicate;
    Trajectory exact;
    if (runs.multiscale)
      exact = simulate_exact(scenario.model, scenario.mesh, registry, scenario.init, sample_times);
    const Trajectory hybrid =
        simulate_hybrid(scenario.model, scenario.mesh, registry, scenario.init, sample_times, options);
    if (runs.multiscale) out.multiscale = distances(exact, hybrid);
    if (runs.splitting) {
      const Trajectory ss = simulate_splitstep(scenario.model, scenario.mesh, registry,
                                               scenario.init, sample_times, *split);
      out.splitting = distances(hybrid, ss);
    }
    return out;
  });
}

RmsEstimate rms_estimate(std::span<const double> squared) {
  require(squared.size() >= 2, "rms_estimate: need at least 2 samples");
  RmsEstimate e;
  e.N = squared.size();
  const double n = static_cast<double>(e.N);
  double sum = 0.0;
  for (double x : squared) {
    require(std::isfinite(x) && x >= 0.0, "rms_estimate: samples must be finite and nonnegative");
    sum += x;
  }
  e.M = sum / n;
  double ss = 0.0;
  for (double x : squared) ss += (x - e.M) * (x - e.M);
  e.S2 = ss / (n - 1.0);
  e.rms = std::sqrt(e.M);
  e.rms_stderr = e.rms > 0.0 ? std::sqrt(e.S2 / n) / (2.0 * e.rms) : 0.0;
  return e;
}

SlopeFit fit_slope(std::span<const double> log_x, std::span<const double> log_y) {
  require(log_x.size() == log_y.size(), "fit_slope: x and y differ in length");
  SlopeFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < log_x.size(); ++i) {
    if (!std::isfinite(log_x[i]) || !std::isfinite(log_y[i])) {
      fit.warnings.push_back("point " + std::to_string(i) + " is not finite and was dropped");
      continue;
    }
    xs.push_back(log_x[i]);
    ys.push_back(log_y[i]);
  }
  require(xs.size() >= 3, "fit_slope: fewer than 3 finite points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  require(sxx > 0.0, "fit_slope: x values are all equal");
  fit.slope = sxy / sxx;
  const double b = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (b + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.stderr_ = std::sqrt(rss / (n - 2.0) / sxx);
  fit.points = xs.size();
  return fit;
}

std::array<Exponent, 3> predicted_rms_slopes(const OrderPrediction& p, Axis axis) {
  const Rational half(1, 2);
  auto halve = [&](const Exponent& e) -> Exponent {
    if (!e) return std::nullopt;
    return *e * half;
  };
  Exponent meso;
  Exponent macro;
  if (axis == Axis::Epsilon) {
    meso = halve(p.multiscale_meso);
    macro = halve(p.multiscale_macro);
  } else {
    // h^1 and h^2 terms; the eps factors do not affect the slope in h.
    meso = half;
    macro = Rational(1);
  }
  return {meso, macro, min_exponent(meso, macro)};
}

std::vector<double> sample_grid(double final_time, double sample_dt) {
  require(std::isfinite(final_time) && final_time > 0.0, "sample grid: final_time must be positive");
  require(std::isfinite(sample_dt) && sample_dt >= 0.0, "sample grid: sample_dt must be >= 0");
  if (sample_dt == 0.0) return {final_time};
  const double steps = final_time / sample_dt;
  const double n = std::round(steps);
  require(n >= 1.0 && std::abs(steps - n) <= 1e-9 * n,
          "sample grid: final_time must be a multiple of sample_dt");
  std::vector<double> out;
  for (std::size_t k = 1; k < static_cast<std::size_t>(n); ++k)
    out.push_back(static_cast<double>(k) * sample_dt);
  out.push_back(final_time);
  return out;
}

SweepResult sweep_epsilon(const ScenarioFactory& family, std::span<const double> eps_grid,
                          const SweepSettings& settings) {
  check_grid(eps_grid, "sweep_epsilon");
  check_settings(settings);
  SweepResult result;
  result.axis = Axis::Epsilon;
  result.sample_times = sample_grid(settings.final_time, settings.sample_dt);
  {
    const Scenario probe = family(eps_grid.front());
    const auto ex = effective_exponents(probe.model);
    result.prediction = predict_orders(ex.u, ex.v);
  }
  for (double eps : eps_grid) {
    try {
      const Scenario sc = family(eps);
      const std::function<std::vector<SquaredDistance>(std::size_t)> job = [&](std::size_t rep) {
        return coupled_replicate(sc, std::nullopt, settings.seed, rep, result.sample_times,
                                 settings.hybrid, {true, false})
            .multiscale;
      };
      const auto reps = parallel_map(settings.replicates, settings.threads, job);
      result.points.push_back(aggregate(eps, result.sample_times.size(), reps));
    } catch (const SimulationError& e) {
      result.failure = "epsilon " + std::to_string(eps) + ": " + e.what();
      break;
    }
  }
  fit_all(result);
  return result;
}

SweepResult sweep_h(const Scenario& scenario, std::span<const double> h_grid,
                    const SweepSettings& settings) {
  check_grid(h_grid, "sweep_h");
  check_settings(settings);
  require(settings.ode_substeps >= 1, "sweep_h: ode_substeps must be >= 1");
  SweepResult result;
  result.axis = Axis::StepH;
  result.sample_times = sample_grid(settings.final_time, settings.sample_dt);
  for (double h : h_grid) {
    for (double t : result.sample_times) {
      const double m = t / h;
      require(std::abs(m - std::round(m)) <= 1e-9 * std::max(1.0, m),
              "sweep_h: sample times must be multiples of every h");
    }
  }
  const auto ex = effective_exponents(scenario.model);
  result.prediction = predict_orders(ex.u, ex.v);

  const std::size_t nh = h_grid.size();
  using PerH = std::vector<std::vector<SquaredDistance>>;
  const std::function<PerH(std::size_t)> job = [&](std::size_t rep) {
    return annotate(rep, [&] {
      auto registry = derive_registry(settings.seed, rep, scenario.model, scenario.mesh);
      const Trajectory hybrid = simulate_hybrid(scenario.model, scenario.mesh, registry,
                                                scenario.init, result.sample_times, settings.hybrid);
      PerH out;
      for (double h : h_grid) {
        const Trajectory ss =
            simulate_splitstep(scenario.model, scenario.mesh, registry, scenario.init,
                               result.sample_times, SplitStepConfig{h, settings.ode_substeps});
        out.push_back(distances(hybrid, ss));
      }
      return out;
    });
  };
  try {
    const auto reps = parallel_map(settings.replicates, settings.threads, job);
    for (std::size_t k = 0; k < nh; ++k) {
      std::vector<std::vector<SquaredDistance>> at_h;
      at_h.reserve(reps.size());
      for (const auto& r : reps) at_h.push_back(r[k]);
      result.points.push_back(aggregate(h_grid[k], result.sample_times.size(), at_h));
    }
  } catch (const SimulationError& e) {
    result.failure = e.what();
  }
  fit_all(result);
  return result;
}

double moment_diagnostic(const Scenario& scenario, int p, std::size_t replicates,
                         std::span<const double> sample_times, std::uint64_t seed,
                         unsigned threads) {
  require(p >= 1 && p <= 4, "moment_diagnostic: p must be 1, 2, 3 or 4");
  require(replicates >= 1, "moment_diagnostic: need at least one replicate");
  const std::function<double(std::size_t)> job = [&](std::size_t rep) {
    return annotate(rep, [&] {
      auto registry = derive_registry(seed, rep, scenario.model, scenario.mesh);
      const Trajectory tr =
          simulate_exact(scenario.model, scenario.mesh, registry, scenario.init, sample_times);
      double sup = 0.0;
      for (const auto& s : tr.states)
        sup = std::max(sup, static_cast<double>(s.meso_counts.cwiseAbs().sum()) +
                                s.macro_values.cwiseAbs().sum());
      return std::pow(sup, p);
    });
  };
  const auto values = parallel_map(replicates, threads, job);
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(replicates);
}

}  // namespace hybridrd
