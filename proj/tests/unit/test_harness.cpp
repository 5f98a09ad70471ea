#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "hybridrd/builtins.hpp"
#include "hybridrd/harness.hpp"

using namespace hybridrd;

TEST_CASE("rms estimate arithmetic") {
  const std::vector<double> c(5, 2.5);
  const auto e = rms_estimate(c);
  CHECK(e.M == 2.5);
  CHECK(e.S2 == 0.0);
  CHECK(e.N == 5);
  const std::vector<double> two{0.0, 2.0};
  const auto f = rms_estimate(two);
  CHECK(f.M == 1.0);
  CHECK(f.S2 == 2.0);
  CHECK(f.rms == 1.0);
  CHECK(f.rms_stderr == doctest::Approx(0.5));
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(rms_estimate(one), ContractViolation);
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  CHECK(rms_estimate(zeros).rms_stderr == 0.0);
}

TEST_CASE("rms estimate of chi-square draws") {
  std::mt19937_64 rng(99);
  std::chi_squared_distribution<double> chi(3.0);
  std::vector<double> x(10000);
  for (auto& v : x) v = chi(rng);
  const auto e = rms_estimate(x);
  CHECK(std::abs(e.M - 3.0) < 3.0 * std::sqrt(e.S2 / 10000.0));
  CHECK(e.S2 == doctest::Approx(6.0).epsilon(0.1));
}

TEST_CASE("slope fits") {
  const std::vector<double> x{1.0, 0.1, 0.01};
  std::vector<double> lx, ly, lsq, lc;
  for (double v : x) {
    lx.push_back(std::log(v));
    ly.push_back(std::log(v));
    lsq.push_back(std::log(std::sqrt(v)));
    lc.push_back(std::log(4.0));
  }
  auto f = fit_slope(lx, ly);
  CHECK(f.slope == doctest::Approx(1.0));
  CHECK(f.stderr_ < 1e-12);
  CHECK(fit_slope(lx, lsq).slope == doctest::Approx(0.5));
  CHECK(std::abs(fit_slope(lx, lc).slope) < 1e-12);
  for (double a : {-1.3, 0.25, 2.0}) {
    std::vector<double> px, py;
    for (int k = 0; k < 6; ++k) {
      const double xv = std::pow(10.0, -0.5 * k);
      px.push_back(std::log(xv));
      py.push_back(std::log(std::pow(xv, a)));
    }
    CHECK(std::abs(fit_slope(px, py).slope - a) < 1e-12);
  }
}

TEST_CASE("slope fit drops non-finite points") {
  const std::vector<double> lx{0.0, -1.0, -2.0, -3.0};
  const std::vector<double> ly{0.0, -0.5, -INFINITY, -1.5};
  const auto f = fit_slope(lx, ly);
  CHECK(f.slope == doctest::Approx(0.5));
  CHECK(f.points == 3);
  CHECK(f.warnings.size() == 1);
  const std::vector<double> ly2{0.0, -INFINITY, -INFINITY, -1.5};
  CHECK_THROWS_AS(fit_slope(lx, ly2), ContractViolation);
}

TEST_CASE("sample grids") {
  CHECK(sample_grid(1.0, 0.0) == std::vector<double>{1.0});
  const auto g = sample_grid(1.0, 0.25);
  REQUIRE(g.size() == 4);
  CHECK(g.back() == 1.0);
  CHECK_THROWS_AS(sample_grid(1.0, 0.3), ContractViolation);
}

TEST_CASE("coupled replicate degeneracies") {
  auto iso = builtin_isomerization(0.1);
  iso.model.species[1].group = ScaleGroup::Meso;
  CountMatrix meso(2, 10);
  meso.row(0) = iso.init.meso_counts.row(0);
  meso.row(1) = (iso.init.macro_values.row(0) / 0.1).array().round().cast<std::int64_t>();
  iso.init.meso_counts = meso;
  iso.init.macro_values.resize(0, 10);
  const std::vector<double> t{0.5, 1.0};
  const auto s = coupled_replicate(iso, SplitStepConfig{0.5, 8}, 3, 0, t);
  for (const auto& d : s.multiscale) CHECK(d.all() == 0.0);
  for (const auto& d : s.splitting) CHECK(d.all() == 0.0);

  const auto cat = builtin_catalytic(0.01, Orientation::Convergent);
  for (std::size_t rep = 0; rep < 3; ++rep) {
    const auto c = coupled_replicate(cat, SplitStepConfig{0.5, 8}, 3, rep, t);
    REQUIRE(c.multiscale.size() == 2);
    for (const auto& d : c.multiscale) CHECK(d.meso == 0.0);
    CHECK(c.multiscale.back().macro > 0.0);
  }
  CHECK_THROWS_AS(coupled_replicate(cat, std::nullopt, 3, 0, t), ContractViolation);
  const std::vector<double> bad{0.3};
  CHECK_THROWS_AS(coupled_replicate(cat, SplitStepConfig{0.5, 8}, 3, 7, bad), ContractViolation);
  try {
    coupled_replicate(cat, SplitStepConfig{0.5, 8}, 3, 7, bad);
  } catch (const ContractViolation& e) {
    CHECK(std::string(e.what()).find("replicate 7") != std::string::npos);
  }
}

TEST_CASE("coupling lowers the error compared with independent paths") {
  const auto sc = builtin_isomerization(0.1);
  const std::vector<double> t{1.0};
  const int n = 300;
  std::vector<double> coupled, independent;
  for (int r = 0; r < n; ++r) {
    const auto rep = static_cast<std::size_t>(r);
    coupled.push_back(coupled_replicate(sc, std::nullopt, 5, rep, t, {}, {true, false}).multiscale[0].all());
    auto ra = derive_registry(5, rep, sc.model, sc.mesh);
    auto rb = derive_registry(6, rep, sc.model, sc.mesh);
    const auto x = simulate_exact(sc.model, sc.mesh, ra, sc.init, t);
    const auto z = simulate_hybrid(sc.model, sc.mesh, rb, sc.init, t);
    independent.push_back(squared_distance(x.states[0], z.states[0]).all());
  }
  const auto a = rms_estimate(coupled);
  const auto b = rms_estimate(independent);
  CHECK(b.M - a.M > 3.0 * std::sqrt(a.S2 / n + b.S2 / n));
}

TEST_CASE("parallel map keeps results in index order") {
  const std::function<std::size_t(std::size_t)> sq = [](std::size_t i) { return i * i; };
  const auto a = parallel_map(50, 1, sq);
  const auto b = parallel_map(50, 4, sq);
  CHECK(a == b);
  CHECK(a[7] == 49);
  const std::function<int(std::size_t)> boom = [](std::size_t i) -> int {
    if (i == 3) throw SimulationError("boom");
    return 0;
  };
  CHECK_THROWS_AS(parallel_map(10, 3, boom), SimulationError);
}

TEST_CASE("sweep preconditions") {
  const auto sc = builtin_isomerization(0.1);
  SweepSettings s;
  s.replicates = 4;
  const std::vector<double> two{0.5, 0.25};
  CHECK_THROWS_AS(sweep_h(sc, two, s), ContractViolation);
  const std::vector<double> up{0.1, 0.25, 0.5};
  CHECK_THROWS_AS(sweep_h(sc, up, s), ContractViolation);
  const std::vector<double> odd{0.3, 0.2, 0.1};
  CHECK_THROWS_AS(sweep_h(sc, odd, s), ContractViolation);
  const std::vector<double> eps_up{0.001, 0.01, 0.1};
  CHECK_THROWS_AS(sweep_epsilon(builtin_isomerization, eps_up, s), ContractViolation);
}

TEST_CASE("small sweeps are deterministic across thread counts") {
  SweepSettings s;
  s.replicates = 16;
  s.sample_dt = 0.5;
  const std::vector<double> eps{0.1, 0.03, 0.01};
  s.threads = 1;
  const auto a = sweep_epsilon(builtin_isomerization, eps, s);
  s.threads = 3;
  const auto b = sweep_epsilon(builtin_isomerization, eps, s);
  REQUIRE(a.points.size() == 3);
  REQUIRE(b.points.size() == 3);
  for (std::size_t k = 0; k < 3; ++k)
    for (int g = 0; g < 3; ++g) {
      CHECK(a.points[k].final[g].M == b.points[k].final[g].M);
      CHECK(a.points[k].final[g].S2 == b.points[k].final[g].S2);
    }
  CHECK(a.points[0].series.size() == 2);
  CHECK(a.slopes[2].has_value());
  CHECK(a.prediction.applicable == Applicability::Unbounded);

  const std::vector<double> hs{0.5, 0.25, 0.125};
  const auto h = sweep_h(builtin_isomerization(0.1), hs, s);
  REQUIRE(h.points.size() == 3);
  CHECK(h.points[0].final[2].M >= 0.0);
}

TEST_CASE("splitting error shrinks with h") {
  SweepSettings s;
  s.replicates = 200;
  const std::vector<double> hs{0.5, 0.125, 0.03125};
  const auto r = sweep_h(builtin_isomerization(0.1), hs, s);
  CHECK(r.points[0].final[2].M > r.points[2].final[2].M);
}

TEST_CASE("predicted slopes") {
  const auto iso = predict_orders(Rational(0), Rational(1));
  const auto e = predicted_rms_slopes(iso, Axis::Epsilon);
  CHECK(e[0] == Rational(1, 2));
  CHECK(e[1] == Rational(1));
  CHECK(e[2] == Rational(1, 2));
  const auto h = predicted_rms_slopes(iso, Axis::StepH);
  CHECK(h[0] == Rational(1, 2));
  CHECK(h[1] == Rational(1));
}

TEST_CASE("moment diagnostic") {
  auto zero = builtin_isomerization(0.1);
  zero.init.meso_counts.setZero();
  zero.init.macro_values.setZero();
  const std::vector<double> t{0.5, 1.0};
  CHECK(moment_diagnostic(zero, 1, 5, t, 1) == 0.0);
  CHECK_THROWS_AS(moment_diagnostic(zero, 5, 5, t, 1), ContractViolation);

  std::vector<double> m1;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto sc = builtin_isomerization(eps);
    const double p1 = moment_diagnostic(sc, 1, 100, t, 2);
    const double p2 = moment_diagnostic(sc, 2, 100, t, 2);
    CHECK(p2 >= p1 * p1);
    m1.push_back(p1);
  }
  const auto [lo, hi] = std::minmax_element(m1.begin(), m1.end());
  CHECK(*hi / *lo < 2.0);
}
