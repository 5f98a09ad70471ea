#include "hybridrd/simulators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "network.hpp"

namespace hybridrd {

using detail::ClockQueue;
using detail::kInf;
using detail::Network;

int sigma_kernel(double t, double h) {
  require(t >= 0.0 && h > 0.0, "sigma_kernel: need t >= 0 and h > 0");
  const double k = std::floor(t / (h / 2.0));
  return 1 - 2 * static_cast<int>(std::fmod(k, 2.0));
}

double total_unscaled_count(const Model& model, const HybridState& state) {
  return static_cast<double>(state.meso_counts.sum()) + state.macro_values.sum() / model.epsilon;
}

namespace {

void check_inputs(const Model& model, const Mesh& mesh, const PathRegistry& registry,
                  const HybridState& init, std::span<const double> sample_times) {
  model.validate();
  mesh.validate(model.num_species());
  const auto j = static_cast<Eigen::Index>(mesh.num_voxels());
  const auto g1 = static_cast<Eigen::Index>(model.meso_species().size());
  const auto g2 = static_cast<Eigen::Index>(model.macro_species().size());
  require(init.meso_counts.rows() == g1 && init.meso_counts.cols() == j,
          "initial state: meso block must be |G1| x J");
  require(init.macro_values.rows() == g2 && init.macro_values.cols() == j,
          "initial state: macro block must be |G2| x J");
  require((init.meso_counts.array() >= 0).all(), "initial state: negative meso count");
  require(init.macro_values.allFinite() && (init.macro_values.array() >= 0.0).all(),
          "initial state: macro values must be finite and nonnegative");
  require(registry.size() ==
              model.num_reactions() * mesh.num_voxels() +
                  [&] {
                    std::size_t n = 0;
                    for (const auto& e : mesh.edges) n += e.size();
                    return n;
                  }(),
          "path registry does not match model and mesh");
  double last = init.time;
  for (double s : sample_times) {
    require(std::isfinite(s) && s >= last, "sample times must be finite, sorted and >= start time");
    last = s;
  }
}

HybridState snapshot_counts(const Model& model, const CountMatrix& x, double t) {
  const auto meso = model.meso_species();
  const auto macro = model.macro_species();
  HybridState s;
  s.time = t;
  s.meso_counts.resize(static_cast<Eigen::Index>(meso.size()), x.cols());
  s.macro_values.resize(static_cast<Eigen::Index>(macro.size()), x.cols());
  for (std::size_t r = 0; r < meso.size(); ++r)
    s.meso_counts.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(meso[r]));
  for (std::size_t r = 0; r < macro.size(); ++r)
    s.macro_values.row(static_cast<Eigen::Index>(r)) =
        x.row(static_cast<Eigen::Index>(macro[r])).cast<double>() * model.epsilon;
  return s;
}

void check_rate(double rate, std::size_t c) {
  if (!std::isfinite(rate))
    throw SimulationError("event-rate overflow: non-finite rate on channel " + std::to_string(c));
}

/// Meso/Macro bookkeeping and the augmented ODE right-hand side used by the
/// hybrid and split-step simulators. The ODE state vector holds the Macro block
/// (column-major, |G2| x J) followed by one operational time per integrated
/// channel.
class MixedSystem {
public:
  MixedSystem(const Network& net, std::vector<std::size_t> integrated)
      : net_(net),
        model_(net.model()),
        meso_(model_.meso_species()),
        macro_(model_.macro_species()),
        integrated_(std::move(integrated)),
        d_(static_cast<Eigen::Index>(net.num_species())),
        g2_(static_cast<Eigen::Index>(macro_.size())),
        x_(d_, static_cast<Eigen::Index>(net.num_voxels())) {
    x_.setZero();
    const double eps = model_.epsilon;
    for (std::size_t r = 0; r < model_.num_reactions(); ++r) {
      if (!model_.touches_macro(r)) continue;
      const auto& s = model_.reactions[r].stoich;
      for (std::size_t j = 0; j < net.num_voxels(); ++j) {
        Flux f{flat(model_.reactions[r].rate_law, model_.rate_constant(r), j), {}};
        for (std::size_t i = 0; i < model_.num_species(); ++i) {
          const int v = s[static_cast<Eigen::Index>(i)];
          if (v != 0 && model_.is_macro(i))
            f.rows.push_back({static_cast<Eigen::Index>(model_.group_row(i)) + g2_ * static_cast<Eigen::Index>(j),
                              -eps * v});
        }
        flux_.push_back(std::move(f));
      }
    }
    for (std::size_t row = 0; row < macro_.size(); ++row) {
      const auto i = macro_[row];
      const double q = model_.transport_scale(i);
      for (const auto& e : net.mesh().edges[i])
        hops_.push_back({static_cast<Eigen::Index>(i) + d_ * static_cast<Eigen::Index>(e.from),
                         static_cast<Eigen::Index>(row) + g2_ * static_cast<Eigen::Index>(e.from),
                         static_cast<Eigen::Index>(row) + g2_ * static_cast<Eigen::Index>(e.to),
                         eps * q * e.base_rate});
    }
    for (auto c : integrated_) {
      const auto& ch = net.channel(c);
      if (ch.is_reaction) {
        rates_.push_back(flat(model_.reactions[ch.index].rate_law, ch.constant, ch.from));
      } else {
        RateLaw hop{RateKind::Unary, ch.index, 0, 0.0, Rational(0)};
        rates_.push_back(flat(hop, ch.constant, ch.from));
      }
    }
  }

  std::size_t macro_size() const { return macro_.size() * net_.num_voxels(); }
  std::size_t size() const { return macro_size() + integrated_.size(); }
  bool continuous() const { return size() > 0; }
  const std::vector<std::size_t>& integrated() const { return integrated_; }
  const Eigen::MatrixXd& unscaled() const { return x_; }

  void load(const HybridState& s, Eigen::VectorXd& y) {
    for (std::size_t r = 0; r < meso_.size(); ++r)
      x_.row(static_cast<Eigen::Index>(meso_[r])) =
          s.meso_counts.row(static_cast<Eigen::Index>(r)).cast<double>();
    y.setZero(static_cast<Eigen::Index>(size()));
    y.head(static_cast<Eigen::Index>(macro_size())) =
        Eigen::Map<const Eigen::VectorXd>(s.macro_values.data(), s.macro_values.size());
    set_macro(y);
  }

  /// Writes Macro rows of the unscaled matrix from y (negative values read as 0).
  void set_macro(const Eigen::VectorXd& y) {
    const double inv_eps = 1.0 / model_.epsilon;
    double* x = x_.data();
    for (Eigen::Index j = 0; j < x_.cols(); ++j)
      for (Eigen::Index r = 0; r < g2_; ++r)
        x[static_cast<Eigen::Index>(macro_[static_cast<std::size_t>(r)]) + d_ * j] =
            std::max(y[r + g2_ * j], 0.0) * inv_eps;
  }

  void set_count(std::size_t species, std::size_t voxel, std::int64_t value) {
    x_(static_cast<Eigen::Index>(species), static_cast<Eigen::Index>(voxel)) =
        static_cast<double>(value);
  }

  /// dy = factor * [drift; integrated rates] at y.
  void derivative(const Eigen::VectorXd& y, Eigen::VectorXd& dy, double factor) {
    set_macro(y);
    dy.setZero(y.size());
    const double* x = x_.data();
    for (const auto& f : flux_) {
      const double w = f.rate.eval(x);
      for (const auto& [at, coef] : f.rows) dy[at] += coef * w;
    }
    for (const auto& hop : hops_) {
      const double flux = hop.rate * x[hop.source];
      dy[hop.from] -= flux;
      dy[hop.to] += flux;
    }
    const auto base = static_cast<Eigen::Index>(macro_size());
    for (std::size_t n = 0; n < rates_.size(); ++n)
      dy[base + static_cast<Eigen::Index>(n)] = rates_[n].eval(x);
    if (factor != 1.0) dy *= factor;
    if (!dy.allFinite()) throw SimulationError("ODE right-hand side is not finite");
  }

  void rk4(const Eigen::VectorXd& y0, double dt, Eigen::VectorXd& y1, double factor = 1.0) {
    derivative(y0, k1_, factor);
    tmp_ = y0 + 0.5 * dt * k1_;
    derivative(tmp_, k2_, factor);
    tmp_ = y0 + 0.5 * dt * k2_;
    derivative(tmp_, k3_, factor);
    tmp_ = y0 + dt * k3_;
    derivative(tmp_, k4_, factor);
    y1 = y0 + (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  /// Clamp integrator overshoot below zero on the Macro block.
  void clamp(Eigen::VectorXd& y) const {
    auto head = y.head(static_cast<Eigen::Index>(macro_size()));
    head = head.cwiseMax(0.0);
  }

  /// Rates of the integrated channels at y.
  void integrated_rates(const Eigen::VectorXd& y, std::vector<double>& out) {
    set_macro(y);
    out.resize(rates_.size());
    for (std::size_t n = 0; n < rates_.size(); ++n) out[n] = rates_[n].eval(x_.data());
  }

  double integrated_rate(const Eigen::VectorXd& y, std::size_t n) {
    set_macro(y);
    return rates_[n].eval(x_.data());
  }

  HybridState snapshot(const CountMatrix& meso, const Eigen::VectorXd& y, double t) const {
    HybridState s;
    s.time = t;
    s.meso_counts = meso;
    s.macro_values = Eigen::Map<const Eigen::MatrixXd>(
        y.data(), static_cast<Eigen::Index>(macro_.size()),
        static_cast<Eigen::Index>(net_.num_voxels()));
    return s;
  }

private:
  // Mass-action law bound to one voxel, reading the column-major unscaled matrix.
  struct FlatRate {
    RateKind kind;
    double k;
    Eigen::Index a;
    Eigen::Index b;
    double volume;

    double eval(const double* x) const {
      double raw = 0.0;
      switch (kind) {
        case RateKind::Constant:
          raw = k * volume;
          break;
        case RateKind::Unary:
          raw = k * x[a];
          break;
        case RateKind::BinaryHetero:
          raw = k * x[a] * x[b] / volume;
          break;
        case RateKind::BinaryHomo:
          raw = k * x[a] * (x[a] - 1.0) / volume;
          break;
      }
      return std::max(raw, 0.0);
    }
  };
  struct Flux {
    FlatRate rate;
    std::vector<std::pair<Eigen::Index, double>> rows;  // (index into y, -eps * stoich)
  };
  struct Hop {
    Eigen::Index source;  // into x
    Eigen::Index from;    // into y
    Eigen::Index to;
    double rate;  // eps * q
  };

  FlatRate flat(const RateLaw& law, double k, std::size_t j) const {
    const auto off = d_ * static_cast<Eigen::Index>(j);
    return {law.kind, k, static_cast<Eigen::Index>(law.species_a) + off,
            static_cast<Eigen::Index>(law.species_b) + off, net_.volume(j)};
  }

  const Network& net_;
  const Model& model_;
  std::vector<std::size_t> meso_;
  std::vector<std::size_t> macro_;
  std::vector<std::size_t> integrated_;
  Eigen::Index d_;
  Eigen::Index g2_;
  std::vector<Flux> flux_;
  std::vector<Hop> hops_;
  std::vector<FlatRate> rates_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd k1_, k2_, k3_, k4_, tmp_;
};

/// Channels that jump Meso species: reactions with a nonzero Meso stoichiometry
/// entry and transport of Meso species.
std::vector<std::size_t> stochastic_channels(const Network& net) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < net.size(); ++c) {
    const auto& ch = net.channel(c);
    if (ch.is_reaction ? net.model().touches_meso(ch.index) : !net.model().is_macro(ch.index))
      out.push_back(c);
  }
  return out;
}

bool reads_macro(const Network& net, std::size_t c) {
  const auto& ch = net.channel(c);
  return ch.is_reaction ? net.model().reads_macro(ch.index) : net.model().is_macro(ch.index);
}

/// Applies the Meso part of channel c's jump.
void apply_meso_jump(const Network& net, std::size_t c, CountMatrix& meso, MixedSystem& sys) {
  const auto& model = net.model();
  for (const auto& e : net.changes(c, true)) {
    const auto row = static_cast<Eigen::Index>(model.group_row(e.species));
    auto& v = meso(row, static_cast<Eigen::Index>(e.voxel));
    v += e.delta;
    if (v < 0)
      throw SimulationError("negative count of species '" + model.species[e.species].name +
                            "' after jump on channel " + std::to_string(c));
    sys.set_count(e.species, e.voxel, v);
  }
}

}  // namespace

Eigen::MatrixXd drift(const Model& model, const Mesh& mesh, const HybridState& state) {
  model.validate();
  mesh.validate(model.num_species());
  Network net(model, mesh);
  MixedSystem sys(net, {});
  Eigen::VectorXd y;
  Eigen::VectorXd dy;
  sys.load(state, y);
  sys.derivative(y, dy, 1.0);
  return Eigen::Map<const Eigen::MatrixXd>(dy.data(), state.macro_values.rows(),
                                           state.macro_values.cols());
}

Trajectory simulate_exact(const Model& model, const Mesh& mesh, PathRegistry& registry,
                          const HybridState& init, std::span<const double> sample_times) {
  check_inputs(model, mesh, registry, init, sample_times);
  Network net(model, mesh);
  const auto meso = model.meso_species();
  const auto macro = model.macro_species();

  CountMatrix x(static_cast<Eigen::Index>(model.num_species()),
                static_cast<Eigen::Index>(mesh.num_voxels()));
  for (std::size_t r = 0; r < meso.size(); ++r)
    x.row(static_cast<Eigen::Index>(meso[r])) = init.meso_counts.row(static_cast<Eigen::Index>(r));
  for (std::size_t r = 0; r < macro.size(); ++r) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double v = init.macro_values(static_cast<Eigen::Index>(r), j);
      const double n = std::round(v / model.epsilon);
      require(std::abs(n * model.epsilon - v) <= 1e-9 * std::max(1.0, v),
              "simulate_exact: macro values must be multiples of epsilon");
      x(static_cast<Eigen::Index>(macro[r]), j) = static_cast<std::int64_t>(n);
    }
  }

  std::vector<std::size_t> all(net.size());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
  const auto deps = net.dependencies(all, false);
  ClockQueue queue(registry, all, init.time);
  for (auto c : all) {
    const double rate = net.rate(c, x);
    check_rate(rate, c);
    queue.set_rate(c, init.time, rate);
  }

  Trajectory traj;
  traj.sample_times.assign(sample_times.begin(), sample_times.end());
  for (double s : sample_times) {
    while (queue.top_time() <= s) {
      const std::size_t c = queue.top();
      const double t = queue.top_time();
      queue.fire(c, t);
      for (const auto& e : net.changes(c, false)) {
        auto& v = x(static_cast<Eigen::Index>(e.species), static_cast<Eigen::Index>(e.voxel));
        v += e.delta;
        if (v < 0)
          throw SimulationError("negative count of species '" + model.species[e.species].name +
                                "' after jump on channel " + std::to_string(c));
      }
      for (auto a : deps[c]) {
        const double rate = net.rate(a, x);
        check_rate(rate, a);
        queue.set_rate(a, t, rate);
      }
      ++traj.event_count;
    }
    traj.states.push_back(snapshot_counts(model, x, s));
  }
  return traj;
}

Trajectory simulate_hybrid(const Model& model, const Mesh& mesh, PathRegistry& registry,
                           const HybridState& init, std::span<const double> sample_times,
                           const HybridOptions& options) {
  check_inputs(model, mesh, registry, init, sample_times);
  require(options.ode_step > 0.0 && options.event_tol > 0.0,
          "simulate_hybrid: ode_step and event_tol must be positive");
  Network net(model, mesh);

  const auto stochastic = stochastic_channels(net);
  std::vector<std::size_t> analytic;
  std::vector<std::size_t> integrated;
  for (auto c : stochastic) (reads_macro(net, c) ? integrated : analytic).push_back(c);

  MixedSystem sys(net, integrated);
  const auto deps = net.dependencies(analytic, true);
  CountMatrix meso = init.meso_counts;
  Eigen::VectorXd y;
  sys.load(init, y);

  ClockQueue queue(registry, analytic, init.time);
  for (auto c : analytic) {
    const double rate = net.rate(c, sys.unscaled());
    check_rate(rate, c);
    queue.set_rate(c, init.time, rate);
  }
  const auto n_int = integrated.size();
  const auto base = static_cast<Eigen::Index>(sys.macro_size());
  std::vector<double> next_arrival(n_int);
  std::vector<std::size_t> next_index(n_int, 0);
  for (std::size_t n = 0; n < n_int; ++n) next_arrival[n] = registry[integrated[n]].arrival(0);

  Trajectory traj;
  traj.sample_times.assign(sample_times.begin(), sample_times.end());

  auto fire_analytic = [&](double t) {
    while (queue.top_time() <= t) {
      const std::size_t c = queue.top();
      const double te = queue.top_time();
      queue.fire(c, te);
      apply_meso_jump(net, c, meso, sys);
      for (auto a : deps[c]) {
        const double rate = net.rate(a, sys.unscaled());
        check_rate(rate, a);
        queue.set_rate(a, te, rate);
      }
      ++traj.event_count;
    }
  };

  auto fire_integrated = [&](std::size_t n, double t) {
    const std::size_t c = integrated[n];
    y[base + static_cast<Eigen::Index>(n)] = next_arrival[n];
    next_arrival[n] = registry[c].arrival(++next_index[n]);
    apply_meso_jump(net, c, meso, sys);
    // Analytic channels reading the changed Meso entries switch rates now.
    for (const auto& e : net.changes(c, true))
      for (auto a : net.readers(e.species, e.voxel)) {
        if (reads_macro(net, a) || std::find(analytic.begin(), analytic.end(), a) == analytic.end())
          continue;
        const double rate = net.rate(a, sys.unscaled());
        check_rate(rate, a);
        queue.set_rate(a, t, rate);
      }
    ++traj.event_count;
  };

  auto crossed = [&](const Eigen::VectorXd& v, std::size_t n) {
    return v[base + static_cast<Eigen::Index>(n)] >= next_arrival[n];
  };

  Eigen::VectorXd y1;
  std::vector<double> rates;
  Eigen::VectorXd ytau;
  Eigen::VectorXd yhi;

  // Locate the first integrated crossing in (t, t + dt]; y1 is the state at t + dt.
  // Returns the step length to the event and the crossing channel, with ytau set
  // to the state at the event.
  auto localize = [&](double t, double dt) -> std::pair<double, std::size_t> {
    const double tol = options.event_tol * (1.0 + t);
    double lo = 0.0;
    double hi = dt;
    yhi = y1;
    for (;;) {
      std::size_t best = n_int;
      double best_tau = kInf;
      for (std::size_t n = 0; n < n_int; ++n) {
        if (!crossed(yhi, n)) continue;
        const auto idx = base + static_cast<Eigen::Index>(n);
        const double span = yhi[idx] - y[idx];
        const double frac = span > 0.0 ? (next_arrival[n] - y[idx]) / span : 1.0;
        const double tau = hi * std::clamp(frac, 0.0, 1.0);
        if (tau < best_tau) {
          best_tau = tau;
          best = n;
        }
      }
      const auto idx = base + static_cast<Eigen::Index>(best);
      double tau = std::clamp(best_tau, lo, hi);
      double event = hi;
      bool converged = false;
      for (int iter = 0; iter < 200; ++iter) {
        sys.rk4(y, tau, ytau);
        const double g = ytau[idx] - next_arrival[best];
        if (g >= 0.0) {
          hi = tau;
          yhi = ytau;
        } else {
          lo = tau;
        }
        const double rate = sys.integrated_rate(ytau, best);
        if (std::abs(g) <= 0.5 * tol * rate) {
          event = tau;
          converged = true;
          break;
        }
        if (hi - lo <= tol) break;
        double next = rate > 0.0 ? tau - g / rate : kInf;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        tau = next;
      }
      if (!converged) {
        event = hi;
        ytau = yhi;
      }
      // An earlier crossing of another channel takes precedence.
      bool earlier = false;
      for (std::size_t n = 0; n < n_int; ++n)
        if (n != best && ytau[base + static_cast<Eigen::Index>(n)] > next_arrival[n]) earlier = true;
      if (!earlier) return {event, best};
      hi = event;
      yhi = ytau;
      lo = std::min(lo, hi);
    }
  };

  double t = init.time;
  for (double s : sample_times) {
    for (;;) {
      fire_analytic(t);
      if (t >= s) break;
      const double t_a = queue.top_time();
      double target = std::min(s, t_a);
      if (!sys.continuous()) {
        t = target;
        continue;
      }
      bool exact_target = true;
      if (t + options.ode_step < target) {
        target = t + options.ode_step;
        exact_target = false;
      }
      if (n_int > 0) {
        // Cap the trial step near the earliest predicted crossing.
        double horizon = kInf;
        sys.integrated_rates(y, rates);
        for (std::size_t n = 0; n < n_int; ++n)
          if (rates[n] > 0.0)
            horizon = std::min(horizon, (next_arrival[n] - y[base + static_cast<Eigen::Index>(n)]) / rates[n]);
        if (t + 1.5 * horizon < target) {
          target = t + 1.5 * horizon;
          exact_target = false;
        }
      }
      const double dt = target - t;
      sys.rk4(y, dt, y1);
      bool any = false;
      for (std::size_t n = 0; n < n_int && !any; ++n) any = crossed(y1, n);
      if (any) {
        const auto [tau, n] = localize(t, dt);
        y = ytau;
        sys.clamp(y);
        sys.set_macro(y);
        t = (tau == dt && exact_target) ? target : t + tau;
        fire_integrated(n, t);
      } else {
        y = y1;
        sys.clamp(y);
        sys.set_macro(y);
        t = target;
      }
    }
    traj.states.push_back(sys.snapshot(meso, y, s));
  }
  return traj;
}

Trajectory simulate_splitstep(const Model& model, const Mesh& mesh, PathRegistry& registry,
                              const HybridState& init, std::span<const double> sample_times,
                              const SplitStepConfig& cfg) {
  check_inputs(model, mesh, registry, init, sample_times);
  require(cfg.h > 0.0 && std::isfinite(cfg.h), "simulate_splitstep: h must be positive");
  require(cfg.ode_substeps >= 1, "simulate_splitstep: ode_substeps must be >= 1");
  const double half = cfg.h / 2.0;
  std::vector<std::size_t> sample_steps;
  for (double s : sample_times) {
    const double m = (s - init.time) / half;
    const double mr = std::round(m);
    require(std::abs(m - mr) <= 1e-9 * std::max(1.0, m),
            "simulate_splitstep: sample times must be multiples of h/2");
    sample_steps.push_back(static_cast<std::size_t>(mr));
  }

  Network net(model, mesh);
  const auto stochastic = stochastic_channels(net);
  MixedSystem sys(net, {});
  const auto deps = net.dependencies(stochastic, true);
  CountMatrix meso = init.meso_counts;
  Eigen::VectorXd y;
  Eigen::VectorXd y1;
  sys.load(init, y);
  ClockQueue queue(registry, stochastic, init.time);

  Trajectory traj;
  traj.sample_times.assign(sample_times.begin(), sample_times.end());
  const double sub = half / cfg.ode_substeps;

  std::size_t step = 0;  // completed half-steps
  for (std::size_t k = 0; k < sample_steps.size(); ++k) {
    while (step < sample_steps[k]) {
      const double t_start = init.time + static_cast<double>(step) * half;
      const double t_end = init.time + static_cast<double>(step + 1) * half;
      if (step % 2 == 0) {
        for (auto c : stochastic) {
          const double rate = net.rate(c, sys.unscaled());
          check_rate(rate, c);
          queue.set_rate(c, t_start, 2.0 * rate);
        }
        while (queue.top_time() <= t_end) {
          const std::size_t c = queue.top();
          const double te = queue.top_time();
          queue.fire(c, te);
          apply_meso_jump(net, c, meso, sys);
          for (auto a : deps[c]) {
            const double rate = net.rate(a, sys.unscaled());
            check_rate(rate, a);
            queue.set_rate(a, te, 2.0 * rate);
          }
          ++traj.event_count;
        }
        for (auto c : stochastic) queue.set_rate(c, t_end, 0.0);
      } else if (sys.continuous()) {
        for (int n = 0; n < cfg.ode_substeps; ++n) {
          sys.rk4(y, sub, y1, 2.0);
          y = y1;
          sys.clamp(y);
        }
        sys.set_macro(y);
      }
      ++step;
    }
    traj.states.push_back(sys.snapshot(meso, y, sample_times[k]));
  }
  return traj;
}

}  // namespace hybridrd
