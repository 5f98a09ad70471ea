#include "hybridrd/model.hpp"

#include <sstream>

namespace hybridrd {

std::optional<Rational> Rational::parse(std::string_view text) {
  auto parse_int = [](std::string_view s) -> std::optional<std::int64_t> {
    if (s.empty()) return std::nullopt;
    std::size_t pos = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
      neg = s[0] == '-';
      pos = 1;
    }
    if (pos == s.size()) return std::nullopt;
    std::int64_t value = 0;
    for (; pos < s.size(); ++pos) {
      if (s[pos] < '0' || s[pos] > '9') return std::nullopt;
      if (value > (INT64_MAX - 9) / 10) return std::nullopt;
      value = value * 10 + (s[pos] - '0');
    }
    return neg ? -value : value;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    auto n = parse_int(text);
    if (!n) return std::nullopt;
    return Rational(*n);
  }
  auto n = parse_int(text.substr(0, slash));
  auto d = parse_int(text.substr(slash + 1));
  if (!n || !d || *d == 0) return std::nullopt;
  return Rational(*n, *d);
}

std::vector<std::size_t> RateLaw::reactants() const {
  switch (kind) {
    case RateKind::Constant:
      return {};
    case RateKind::Unary:
      return {species_a};
    case RateKind::BinaryHetero:
      return {species_a, species_b};
    case RateKind::BinaryHomo:
      return {species_a, species_a};
  }
  return {};
}

void Model::validate() const {
  auto fail = [](const std::string& msg) { throw ContractViolation("model: " + msg); };
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    fail("epsilon must lie in (0, 1]");
  const auto d = num_species();
  for (std::size_t i = 0; i < d; ++i) {
    if (!(species[i].base_hop_rate >= 0.0) || !std::isfinite(species[i].base_hop_rate))
      fail("species '" + species[i].name + "' has a negative hop rate");
  }
  for (std::size_t r = 0; r < num_reactions(); ++r) {
    const auto& rx = reactions[r];
    const auto tag = "reaction " + std::to_string(r);
    if (static_cast<std::size_t>(rx.stoich.size()) != d)
      fail(tag + ": stoichiometry length differs from species count");
    if ((rx.stoich.array() == 0).all()) fail(tag + ": stoichiometry is all zero");
    if (!(rx.rate_law.base_constant >= 0.0) || !std::isfinite(rx.rate_law.base_constant))
      fail(tag + ": negative rate constant");
    for (auto s : rx.rate_law.reactants())
      if (s >= d) fail(tag + ": rate law references an unknown species");
  }
}

std::size_t Model::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < species.size(); ++i)
    if (species[i].name == name) return i;
  throw ContractViolation("model: unknown species '" + name + "'");
}

double Model::rate_constant(std::size_t r) const {
  const auto& law = reactions.at(r).rate_law;
  return law.base_constant * std::pow(epsilon, law.epsilon_exponent.to_double());
}

double Model::transport_scale(std::size_t i) const {
  return std::pow(epsilon, -species.at(i).transport_exponent.to_double());
}

std::vector<std::size_t> Model::meso_species() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < species.size(); ++i)
    if (!is_macro(i)) out.push_back(i);
  return out;
}

std::vector<std::size_t> Model::macro_species() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < species.size(); ++i)
    if (is_macro(i)) out.push_back(i);
  return out;
}

std::size_t Model::group_row(std::size_t i) const {
  std::size_t row = 0;
  for (std::size_t k = 0; k < i; ++k)
    if (is_macro(k) == is_macro(i)) ++row;
  return row;
}

bool Model::touches_meso(std::size_t r) const {
  const auto& s = reactions.at(r).stoich;
  for (std::size_t i = 0; i < species.size(); ++i)
    if (s[static_cast<Eigen::Index>(i)] != 0 && !is_macro(i)) return true;
  return false;
}

bool Model::touches_macro(std::size_t r) const {
  const auto& s = reactions.at(r).stoich;
  for (std::size_t i = 0; i < species.size(); ++i)
    if (s[static_cast<Eigen::Index>(i)] != 0 && is_macro(i)) return true;
  return false;
}

bool Model::reads_macro(std::size_t r) const {
  for (auto s : reactions.at(r).rate_law.reactants())
    if (is_macro(s)) return true;
  return false;
}

double propensity(const Model& model, std::size_t reaction,
                  std::span<const double> unscaled_counts, double voxel_volume) {
  require(reaction < model.num_reactions(),
          "propensity: reaction index " + std::to_string(reaction) + " out of range");
  require(unscaled_counts.size() == model.num_species(),
          "propensity: count vector length differs from species count");
  require(voxel_volume > 0.0 && std::isfinite(voxel_volume),
          "propensity: voxel volume must be positive");
  for (double x : unscaled_counts)
    require(std::isfinite(x) && x >= 0.0, "propensity: counts must be finite and nonnegative");
  return evaluate_rate(model.reactions[reaction].rate_law, model.rate_constant(reaction),
                       unscaled_counts, voxel_volume);
}

Rational reaction_scaling(const Model& model, std::size_t r) {
  const auto& law = model.reactions.at(r).rate_law;
  Rational nu = -law.epsilon_exponent;
  for (auto s : law.reactants())
    if (model.is_macro(s)) nu = nu + Rational(1);
  return nu;
}

EffectiveExponents effective_exponents(const Model& model) {
  Exponent meso_min;
  Exponent macro_min;
  for (std::size_t r = 0; r < model.num_reactions(); ++r) {
    const Exponent neg_nu = -reaction_scaling(model, r);
    if (model.touches_meso(r)) meso_min = min_exponent(meso_min, neg_nu);
    if (model.touches_macro(r)) macro_min = min_exponent(macro_min, neg_nu);
  }
  for (std::size_t i = 0; i < model.num_species(); ++i) {
    const Exponent neg_mu = -model.species[i].transport_exponent;
    if (model.is_macro(i))
      macro_min = min_exponent(macro_min, neg_mu);
    else
      meso_min = min_exponent(meso_min, neg_mu);
  }
  EffectiveExponents out;
  out.u = meso_min;
  if (macro_min) out.v = Rational(1) + *macro_min;
  return out;
}

std::string to_string(Applicability a) {
  switch (a) {
    case Applicability::None:
      return "None";
    case Applicability::Bounded:
      return "Bounded";
    case Applicability::Unbounded:
      return "Unbounded";
  }
  return "None";
}

namespace {

// Arithmetic on exponents where nullopt is +infinity.
Exponent add(const Exponent& a, const Exponent& b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

Exponent scale(const Exponent& a, Rational c) {
  if (!a) return std::nullopt;
  return *a * c;
}

bool nonneg(const Exponent& e) { return !e || *e >= Rational(0); }
bool positive(const Exponent& e) { return !e || *e > Rational(0); }

}  // namespace

OrderPrediction predict_orders(const Exponent& u, const Exponent& v) {
  OrderPrediction p;
  p.u = u;
  p.v = v;
  p.multiscale_macro = add(Rational(1), v);
  p.multiscale_meso = add(add(Rational(1, 2), scale(v, Rational(1, 2))), u);
  p.splitstep_meso = min_exponent(scale(u, Rational(2)), add(u, v));
  p.splitstep_macro = scale(v, Rational(2));
  if (nonneg(u) && nonneg(v))
    p.applicable = positive(v) ? Applicability::Unbounded : Applicability::Bounded;
  return p;
}

}  // namespace hybridrd
