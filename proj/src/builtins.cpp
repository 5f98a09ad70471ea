#include "hybridrd/builtins.hpp"

#include <cmath>
#include <vector>

namespace hybridrd {

namespace {

constexpr std::size_t kVoxels = 10;

Eigen::VectorXi column(std::initializer_list<int> v) {
  Eigen::VectorXi s(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (int x : v) s[i++] = x;
  return s;
}

ReactionDef unary(std::size_t a, double k, Rational p, Eigen::VectorXi stoich) {
  return {std::move(stoich), RateLaw{RateKind::Unary, a, 0, k, p}};
}

ReactionDef binary(std::size_t a, std::size_t b, double k, Rational p, Eigen::VectorXi stoich) {
  return {std::move(stoich), RateLaw{RateKind::BinaryHetero, a, b, k, p}};
}

Scenario finish(Model model) {
  model.validate();
  std::vector<double> hops;
  for (const auto& s : model.species) hops.push_back(s.base_hop_rate);
  Scenario sc;
  sc.mesh = periodic_1d_mesh(kVoxels, 1.0, hops);
  sc.init = standard_initial_state(model, kVoxels);
  sc.model = std::move(model);
  return sc;
}

}  // namespace

HybridState standard_initial_state(const Model& model, std::size_t num_voxels) {
  const auto meso = model.meso_species();
  const auto macro = model.macro_species();
  const auto nj = static_cast<Eigen::Index>(num_voxels);
  HybridState s;
  s.meso_counts.resize(static_cast<Eigen::Index>(meso.size()), nj);
  s.macro_values.resize(static_cast<Eigen::Index>(macro.size()), nj);
  const double hi = std::round(20.0 / model.epsilon) * model.epsilon;
  const double lo = std::round(10.0 / model.epsilon) * model.epsilon;
  for (Eigen::Index j = 0; j < nj; ++j) {
    const bool first = j < nj / 2;
    s.meso_counts.col(j).setConstant(first ? 10 : 20);
    s.macro_values.col(j).setConstant(first ? hi : lo);
  }
  return s;
}

Scenario builtin_isomerization(double epsilon) {
  require(epsilon > 0.0 && epsilon <= 1.0, "builtin_isomerization: epsilon must lie in (0, 1]");
  Model m;
  m.epsilon = epsilon;
  m.species = {{"A", ScaleGroup::Meso, Rational(0), 0.5}, {"B", ScaleGroup::Macro, Rational(0), 0.0}};
  m.reactions = {unary(0, 1.0, Rational(0), column({1, -1})),
                 unary(1, 1.0, Rational(1), column({-1, 1}))};
  return finish(std::move(m));
}

Scenario builtin_catalytic(double epsilon, Orientation orientation) {
  require(epsilon > 0.0 && epsilon <= 1.0, "builtin_catalytic: epsilon must lie in (0, 1]");
  const bool conv = orientation == Orientation::Convergent;
  const ScaleGroup ac = conv ? ScaleGroup::Macro : ScaleGroup::Meso;
  const ScaleGroup bd = conv ? ScaleGroup::Meso : ScaleGroup::Macro;
  // Species hopping at rate eps carry mu = -1 with base rate 1.
  const Rational mu_ac(-1);
  const Rational mu_bd = conv ? Rational(0) : Rational(-1);
  const Rational p = conv ? Rational(0) : Rational(1, 4);
  Model m;
  m.epsilon = epsilon;
  m.species = {{"A", ac, mu_ac, 1.0}, {"B", bd, mu_bd, 1.0}, {"C", ac, mu_ac, 1.0},
               {"D", bd, mu_bd, 1.0}};
  m.reactions = {binary(0, 1, 0.01, p, column({1, 0, -1, 0})),
                 binary(2, 3, 0.01, p, column({-1, 0, 1, 0})),
                 unary(1, 1.0, Rational(0), column({0, 1, 0, -1})),
                 unary(3, 0.9, Rational(0), column({0, -1, 0, 1}))};
  return finish(std::move(m));
}

}  // namespace hybridrd
