// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance               all criteria
//   acceptance --criterion N just criterion N

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hybridrd/builtins.hpp"
#include "hybridrd/harness.hpp"
#include "hybridrd/model.hpp"
#include "hybridrd/poisson_path.hpp"
#include "hybridrd/simulators.hpp"

using namespace hybridrd;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

bool within(double x, double lo, double hi) { return std::isfinite(x) && x >= lo && x <= hi; }

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

const std::vector<double>& eps_grid() {
  static const std::vector<double> g{1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
  return g;
}

SweepSettings settings(std::size_t n, double sample_dt) {
  SweepSettings s;
  s.replicates = n;
  s.final_time = 1.0;
  s.sample_dt = sample_dt;
  s.seed = 20240601;
  s.threads = workers();
  return s;
}

std::optional<double> slope(const SweepResult& r, Group g) {
  const auto& f = r.slopes[static_cast<int>(g)];
  if (!f) return std::nullopt;
  return f->slope;
}

std::string slope_text(const SweepResult& r, Group g) {
  const auto s = slope(r, g);
  return to_string(g) + " slope " + (s ? fmt(*s) : "n/a (" + r.slope_errors[static_cast<int>(g)] + ")");
}

std::vector<double> whole_steps(double h, double final_time) {
  std::vector<double> t;
  const long n = std::lround(final_time / h);
  for (long k = 1; k <= n; ++k) t.push_back(h * static_cast<double>(k));
  return t;
}

Verdict c1() {
  const auto r = sweep_epsilon([](double e) { return builtin_isomerization(e); }, eps_grid(),
                               settings(2000, 0.0));
  if (r.failure) return {false, *r.failure};
  const auto meso = slope(r, Group::Meso), macro = slope(r, Group::Macro);
  const bool ok = meso && macro && within(*meso, 0.35, 0.65) && within(*macro, 0.8, 1.2);
  return {ok, slope_text(r, Group::Meso) + " in [0.35, 0.65], " + slope_text(r, Group::Macro) +
                  " in [0.8, 1.2]"};
}

Verdict c2() {
  const auto r = sweep_epsilon(
      [](double e) { return builtin_catalytic(e, Orientation::Convergent); }, eps_grid(),
      settings(2000, 0.1));
  if (r.failure) return {false, *r.failure};
  double worst = 0.0;
  for (const auto& p : r.points) worst = std::max(worst, p.max_squared[static_cast<int>(Group::Meso)]);
  const auto macro = slope(r, Group::Macro);
  const bool ok = worst == 0.0 && macro && within(*macro, 0.35, 0.65);
  return {ok, "max meso squared error " + fmt(worst) + " (must be 0), " +
                  slope_text(r, Group::Macro) + " in [0.35, 0.65]"};
}

Verdict c3() {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  const auto r = sweep_h(builtin_catalytic(1e-2, Orientation::Convergent), h, settings(5000, 0.5));
  if (r.failure) return {false, *r.failure};
  const auto macro = slope(r, Group::Macro);
  return {macro && within(*macro, 0.8, 1.2), slope_text(r, Group::Macro) + " in [0.8, 1.2]"};
}

Verdict c4() {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  const auto r = sweep_h(builtin_isomerization(1e-1), h, settings(5000, 0.5));
  if (r.failure) return {false, *r.failure};
  const auto meso = slope(r, Group::Meso), macro = slope(r, Group::Macro);
  const bool ok = meso && macro && within(*meso, 0.3, 0.7) && within(*macro, 0.75, 1.25);
  return {ok, slope_text(r, Group::Meso) + " in [0.3, 0.7], " + slope_text(r, Group::Macro) +
                  " in [0.75, 1.25]"};
}

Verdict c5() {
  const auto family = [](double e) { return builtin_catalytic(e, Orientation::Divergent); };
  const auto& m = family(eps_grid().front()).model;
  const auto ex = effective_exponents(m);
  const auto pred = predict_orders(ex.u, ex.v);
  const auto r = sweep_epsilon(family, eps_grid(), settings(2000, 0.0));
  if (r.failure) return {false, *r.failure};
  bool monotone = true;
  std::string rms = "rms";
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const double v = r.points[i].final[static_cast<int>(Group::All)].rms;
    rms += " " + fmt(v);
    if (i > 0 && !(v < r.points[i - 1].final[static_cast<int>(Group::All)].rms)) monotone = false;
  }
  const auto all = slope(r, Group::All);
  const bool weak = !monotone || (all && *all < 0.15);
  const bool ok = pred.applicable == Applicability::None && weak;
  return {ok, "applicable = " + to_string(pred.applicable) + ", " + slope_text(r, Group::All) +
                  (monotone ? ", monotone" : ", non-monotone") + ", " + rms};
}

// Isomerization with B kept as integer counts, so there is no Macro group.
Scenario all_meso_isomerization(double eps) {
  Scenario sc = builtin_isomerization(eps);
  const std::size_t j = sc.mesh.num_voxels();
  CountMatrix b = (sc.init.macro_values / eps).array().round().cast<std::int64_t>();
  sc.model.species[1].group = ScaleGroup::Meso;
  CountMatrix meso(2, static_cast<Eigen::Index>(j));
  meso.row(0) = sc.init.meso_counts.row(0);
  meso.row(1) = b.row(0);
  sc.init.meso_counts = meso;
  sc.init.macro_values.resize(0, static_cast<Eigen::Index>(j));
  return sc;
}

Verdict c6() {
  const auto sc = all_meso_isomerization(0.1);
  const std::vector<double> hs{0.5, 0.25, 0.2, 0.1};
  std::mt19937_64 pick(6);
  int mismatches = 0, compared = 0;
  for (int s = 0; s < 100; ++s) {
    const std::uint64_t seed = pick();
    for (double h : hs) {
      const auto t = whole_steps(h, 1.0);
      auto reg = derive_registry(seed, 0, sc.model, sc.mesh);
      const auto x = simulate_exact(sc.model, sc.mesh, reg, sc.init, t);
      const auto z = simulate_hybrid(sc.model, sc.mesh, reg, sc.init, t);
      const auto y = simulate_splitstep(sc.model, sc.mesh, reg, sc.init, t, {h, 8});
      for (std::size_t k = 0; k < t.size(); ++k) {
        compared += 2;
        if (!(x.states[k].meso_counts == z.states[k].meso_counts)) ++mismatches;
        if (!(x.states[k].meso_counts == y.states[k].meso_counts)) ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in " + std::to_string(compared) +
                               " state comparisons over 100 seeds, h in {0.5, 0.25, 0.2, 0.1}"};
}

Verdict c7() {
  const std::size_t n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    PoissonPath p(7, r, ChannelId::reaction(0, 0));
    const double c = static_cast<double>(p.count_up_to(3.0));
    sum += c;
    sum2 += c * c;
  }
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  const double var = (sum2 - nd * mean * mean) / (nd - 1.0);
  const double tol_mean = 3.0 * std::sqrt(3.0 / nd), tol_var = 5.0 * std::sqrt(18.0 / nd);
  const bool ok = std::abs(mean - 3.0) < tol_mean && std::abs(var - 3.0) < tol_var;
  return {ok, "mean " + fmt(mean) + " (tol " + fmt(tol_mean) + "), var " + fmt(var) + " (tol " +
                  fmt(tol_var) + ")"};
}

Verdict c8() {
  Model m;
  m.epsilon = 1.0;
  m.species = {{"A", ScaleGroup::Meso, Rational(0), 0.0}};
  Eigen::VectorXi s(1);
  s << 1;
  m.reactions = {{s, {RateKind::Unary, 0, 0, 1.0, Rational(0)}}};
  Scenario sc;
  sc.mesh = make_mesh(Eigen::VectorXd::Constant(1, 1.0), std::vector<std::vector<Edge>>(1));
  sc.model = m;
  sc.init.meso_counts = CountMatrix::Constant(1, 1, 100);
  sc.init.macro_values = Eigen::MatrixXd(0, 1);
  const std::vector<double> t{0.5, 1.0, 2.0};
  const std::size_t n = 100000;
  std::vector<double> sum(3, 0.0), sum2(3, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    auto reg = derive_registry(8, r, sc.model, sc.mesh);
    const auto tr = simulate_exact(sc.model, sc.mesh, reg, sc.init, t);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double x = static_cast<double>(tr.states[k].meso_counts(0, 0));
      sum[k] += x;
      sum2[k] += x * x;
    }
  }
  bool ok = true;
  std::string detail;
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double mean = sum[k] / nd;
    const double se = std::sqrt((sum2[k] - nd * mean * mean) / (nd - 1.0) / nd);
    const double want = 100.0 * std::exp(-t[k]);
    const double z = (mean - want) / se;
    ok = ok && std::abs(z) <= 3.0;
    detail += (k ? ", " : "") + std::string("t=") + fmt(t[k]) + " mean " + fmt(mean) + " vs " +
              fmt(want) + " (" + fmt(z) + " SE)";
  }
  return {ok, detail};
}

// Integer molecule total of an exact state; macro entries must sit on the eps lattice.
std::optional<std::int64_t> integer_total(const Model& m, const HybridState& s) {
  std::int64_t total = s.meso_counts.sum();
  for (Eigen::Index i = 0; i < s.macro_values.size(); ++i) {
    const double c = s.macro_values.data()[i] / m.epsilon;
    const auto n = std::llround(c);
    if (std::abs(c - static_cast<double>(n)) > 1e-6) return std::nullopt;
    total += n;
  }
  return total;
}

Verdict c9() {
  const auto sc = builtin_catalytic(1e-2, Orientation::Convergent);
  const auto t = whole_steps(0.5, 10.0);
  const double total = total_unscaled_count(sc.model, sc.init);
  const auto count0 = integer_total(sc.model, sc.init);
  std::int64_t exact_drift = 0;
  bool on_lattice = count0.has_value();
  double hybrid_drift = 0.0, split_drift = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto reg = derive_registry(seed, 0, sc.model, sc.mesh);
    const auto x = simulate_exact(sc.model, sc.mesh, reg, sc.init, t);
    const auto z = simulate_hybrid(sc.model, sc.mesh, reg, sc.init, t);
    const auto y = simulate_splitstep(sc.model, sc.mesh, reg, sc.init, t, {0.25, 8});
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto c = integer_total(sc.model, x.states[k]);
      if (!c || !count0) {
        on_lattice = false;
        continue;
      }
      exact_drift = std::max(exact_drift, std::abs(*c - *count0));
      hybrid_drift = std::max(hybrid_drift, std::abs(total_unscaled_count(sc.model, z.states[k]) / total - 1.0));
      split_drift = std::max(split_drift, std::abs(total_unscaled_count(sc.model, y.states[k]) / total - 1.0));
    }
  }
  const bool ok = on_lattice && exact_drift == 0 && hybrid_drift <= 1e-7 && split_drift <= 1e-7;
  return {ok, "exact integer drift " + std::to_string(exact_drift) + (on_lattice ? "" : " (off lattice)") + ", hybrid relative " + fmt(hybrid_drift) +
                  ", split-step relative " + fmt(split_drift)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  if (!fs::exists(dir)) return files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return files;
}

Verdict c10() {
  const auto dir = fs::temp_directory_path() / "hybridrd_acceptance_c10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  struct Case {
    std::string command;
    std::string config;
  };
  const std::vector<Case> cases{
      {"predict-orders", R"({"builtin": "catalytic-divergent"})"},
      {"validate-mesh", R"({"builtin": "catalytic-convergent"})"},
      {"simulate", R"({"builtin": "catalytic-convergent",
        "experiment": {"epsilon": 0.01, "final_time": 2, "sample_dt": 0.5, "h": 0.25}})"},
      {"sweep-epsilon", R"({"builtin": "isomerization",
        "experiment": {"eps_grid": [0.1, 0.03, 0.01], "replicates": 40, "sample_dt": 0.5}})"},
      {"sweep-h", R"({"builtin": "catalytic-convergent",
        "experiment": {"epsilon": 0.01, "h_grid": [0.5, 0.25, 0.125], "replicates": 40}})"},
  };
  const std::string cli = HYBRIDRD_CLI_PATH;
  std::vector<std::string> differing;
  for (const auto& c : cases) {
    const auto cfg = dir / (c.command + ".json");
    std::ofstream(cfg) << c.config;
    const auto out = dir / c.command;
    const auto log = dir / (c.command + ".stdout");
    std::vector<std::map<std::string, std::string>> runs;
    for (int threads : {1, 3}) {
      fs::remove_all(out);
      const std::string cmd = cli + " " + c.command + " --config " + cfg.string() + " --seed 99 --threads " +
                              std::to_string(threads) + " --out " + out.string() + " > " + log.string();
      if (std::system(cmd.c_str()) != 0) return {false, c.command + " exited non-zero"};
      auto files = snapshot(out);
      files["<stdout>"] = slurp(log);
      runs.push_back(std::move(files));
    }
    if (runs[0] != runs[1]) differing.push_back(c.command);
  }
  fs::remove_all(dir);
  std::string detail = std::to_string(cases.size()) + " commands run twice (1 and 3 threads)";
  if (!differing.empty()) {
    detail += ", differing:";
    for (const auto& d : differing) detail += " " + d;
  } else {
    detail += ", outputs byte-identical";
  }
  return {differing.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (which.empty())
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  int failed = 0;
  for (int n : which) {
    if (n < 1 || n > 10) {
      std::cerr << "no criterion " << n << "\n";
      return 2;
    }
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << " " << v.detail << std::endl;
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
