#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hybridrd/errors.hpp"
#include "hybridrd/rational.hpp"

namespace hybridrd {

/// Meso species are kept as integer counts (scale 1); Macro species are
/// represented by the scaled variable epsilon * count.
enum class ScaleGroup { Meso, Macro };

struct SpeciesDef {
  std::string name;
  ScaleGroup group = ScaleGroup::Meso;
  /// Transport rates scale as epsilon^{-transport_exponent} * base rate.
  Rational transport_exponent{0};
  /// Per-molecule, per-direction hop rate before epsilon scaling. 0 = immobile.
  double base_hop_rate = 0.0;
};

enum class RateKind { Constant, Unary, BinaryHetero, BinaryHomo };

/// Mass-action rate law. The physical constant is k = base_constant * eps^p.
struct RateLaw {
  RateKind kind = RateKind::Constant;
  std::size_t species_a = 0;  // Unary, BinaryHetero, BinaryHomo
  std::size_t species_b = 0;  // BinaryHetero
  double base_constant = 0.0;
  Rational epsilon_exponent{0};

  /// Species whose counts appear in the propensity, with multiplicity.
  std::vector<std::size_t> reactants() const;
};

/// Reaction with state update X <- X - stoich (per voxel).
struct ReactionDef {
  Eigen::VectorXi stoich;
  RateLaw rate_law;
};

struct Model {
  std::vector<SpeciesDef> species;
  std::vector<ReactionDef> reactions;
  double epsilon = 1.0;

  std::size_t num_species() const { return species.size(); }
  std::size_t num_reactions() const { return reactions.size(); }

  /// Throws ContractViolation describing the first broken invariant.
  void validate() const;

  std::size_t index_of(const std::string& name) const;

  bool is_macro(std::size_t i) const {
    return species[i].group == ScaleGroup::Macro;
  }
  /// S_i: 1 for Meso, 1/epsilon for Macro.
  double scale(std::size_t i) const { return is_macro(i) ? 1.0 / epsilon : 1.0; }
  /// k = base_constant * epsilon^p.
  double rate_constant(std::size_t r) const;
  /// epsilon^{-mu_i}.
  double transport_scale(std::size_t i) const;

  /// Indices of Meso (G1) and Macro (G2) species in model order.
  std::vector<std::size_t> meso_species() const;
  std::vector<std::size_t> macro_species() const;
  /// Row of species i within its group's block of a HybridState.
  std::size_t group_row(std::size_t i) const;

  /// True if some Meso (resp. Macro) species has a nonzero stoichiometry entry.
  bool touches_meso(std::size_t r) const;
  bool touches_macro(std::size_t r) const;
  /// True if the propensity of r reads some Macro species.
  bool reads_macro(std::size_t r) const;
};

/// Clamped mass-action evaluation on unscaled counts `x` (indexable by
/// species). No argument checking; see `propensity` for the checked form.
template <typename Counts>
inline double evaluate_rate(const RateLaw& law, double k, const Counts& x,
                            double volume) {
  double raw = 0.0;
  switch (law.kind) {
    case RateKind::Constant:
      raw = k * volume;
      break;
    case RateKind::Unary:
      raw = k * static_cast<double>(x[law.species_a]);
      break;
    case RateKind::BinaryHetero:
      raw = k * static_cast<double>(x[law.species_a]) *
            static_cast<double>(x[law.species_b]) / volume;
      break;
    case RateKind::BinaryHomo: {
      const double a = static_cast<double>(x[law.species_a]);
      raw = k * a * (a - 1.0) / volume;
      break;
    }
  }
  return std::max(raw, 0.0);
}

/// Propensity w_rj of reaction r in a voxel of the given volume, evaluated
/// on unscaled counts and clamped at zero.
double propensity(const Model& model, std::size_t reaction,
                  std::span<const double> unscaled_counts, double voxel_volume);

struct EffectiveExponents {
  Exponent u;
  Exponent v;
};

/// nu_r = -p + (number of Macro reactants of r).
Rational reaction_scaling(const Model& model, std::size_t r);

/// The effective exponents (u, v) controlling the predicted error orders.
EffectiveExponents effective_exponents(const Model& model);

enum class Applicability { None, Bounded, Unbounded };

std::string to_string(Applicability a);

struct OrderPrediction {
  Exponent u;
  Exponent v;
  /// Mean-square multiscale error ~ eps^{macro} + eps^{meso}.
  Exponent multiscale_macro;  // 1 + v
  Exponent multiscale_meso;   // 1/2 + v/2 + u
  /// Mean-square splitting error ~ h * eps^{meso} + h^2 * eps^{macro}.
  Exponent splitstep_meso;   // min(2u, u + v), coefficient of h
  Exponent splitstep_macro;  // 2v, coefficient of h^2
  Applicability applicable = Applicability::None;
};

OrderPrediction predict_orders(const Exponent& u, const Exponent& v);

}  // namespace hybridrd
