#include "hybridrd/config.hpp"

#include <cmath>
#include <map>
#include <set>

#include "json.hpp"

namespace hybridrd {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid config";
        for (const auto& i : issues) msg += "\n  " + i;
        return msg;
      }()),
      issues_(std::move(issues)) {}

std::string to_string(BuiltinName b) {
  switch (b) {
    case BuiltinName::Isomerization:
      return "isomerization";
    case BuiltinName::CatalyticConvergent:
      return "catalytic-convergent";
    case BuiltinName::CatalyticDivergent:
      return "catalytic-divergent";
  }
  return "?";
}

namespace {

class Reader {
public:
  std::vector<std::string> issues;

  void fail(const std::string& path, const std::string& msg) { issues.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items())
      if (!allowed.count(key)) fail(path + "." + key, "unknown key");
    return true;
  }

  std::optional<double> number(const json& j, const std::string& path) {
    if (!j.is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      fail(path, "must be finite");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> positive(const json& j, const std::string& path) {
    auto v = number(j, path);
    if (v && !(*v > 0.0)) {
      fail(path, "must be positive");
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::uint64_t> count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
      fail(path, "expected a nonnegative integer");
      return std::nullopt;
    }
    return j.get<std::uint64_t>();
  }

  std::optional<Rational> rational(const json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) {
      if (auto r = Rational::parse(j.get<std::string>())) return r;
      fail(path, "malformed rational \"" + j.get<std::string>() + "\"");
      return std::nullopt;
    }
    if (j.is_number_float()) {
      fail(path, "exponents must be exact rationals; write them as an integer or a \"p/q\" string");
      return std::nullopt;
    }
    fail(path, "expected an integer or a \"p/q\" string");
    return std::nullopt;
  }

  std::vector<double> grid(const json& j, const std::string& path, bool epsilon) {
    std::vector<double> out;
    if (!j.is_array()) {
      fail(path, "expected an array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto p = path + "[" + std::to_string(i) + "]";
      auto v = positive(j[i], p);
      if (!v) continue;
      if (epsilon && *v > 1.0) fail(p, "epsilon must lie in (0, 1]");
      out.push_back(*v);
    }
    if (out.size() != j.size()) return out;
    if (out.size() < 3) fail(path, "need at least 3 grid points");
    for (std::size_t i = 1; i < out.size(); ++i)
      if (!(out[i] < out[i - 1])) {
        fail(path, "grid must be decreasing");
        break;
      }
    return out;
  }
};

std::optional<BuiltinName> builtin_from(const std::string& s) {
  if (s == "isomerization") return BuiltinName::Isomerization;
  if (s == "catalytic-convergent") return BuiltinName::CatalyticConvergent;
  if (s == "catalytic-divergent") return BuiltinName::CatalyticDivergent;
  return std::nullopt;
}

CustomModel read_model(Reader& rd, const json& jm, const json* jmesh) {
  CustomModel cm;
  if (jmesh && rd.object(*jmesh, "mesh", {"voxels", "length"})) {
    if (jmesh->contains("voxels")) {
      auto v = rd.count(jmesh->at("voxels"), "mesh.voxels");
      if (v && *v < 2) rd.fail("mesh.voxels", "a ring needs at least 2 voxels");
      if (v) cm.voxels = static_cast<std::size_t>(*v);
    }
    if (jmesh->contains("length"))
      if (auto v = rd.positive(jmesh->at("length"), "mesh.length")) cm.length = *v;
  }
  if (!rd.object(jm, "model", {"species", "reactions"})) return cm;
  std::map<std::string, std::size_t> names;
  if (!jm.contains("species") || !jm["species"].is_array() || jm["species"].empty()) {
    rd.fail("model.species", "expected a nonempty array");
    return cm;
  }
  const auto& js = jm["species"];
  for (std::size_t i = 0; i < js.size(); ++i) {
    const auto path = "model.species[" + std::to_string(i) + "]";
    SpeciesDef s;
    InitialLayout init;
    cm.model.species.push_back(s);
    cm.initial.push_back(init);
    if (!rd.object(js[i], path, {"name", "group", "mu", "hop_rate", "initial"})) continue;
    const auto& o = js[i];
    auto& sp = cm.model.species.back();
    if (!o.contains("name") || !o["name"].is_string() || o["name"].get<std::string>().empty()) {
      rd.fail(path + ".name", "expected a nonempty string");
    } else {
      sp.name = o["name"].get<std::string>();
      if (names.count(sp.name)) rd.fail(path + ".name", "duplicate species \"" + sp.name + "\"");
      names[sp.name] = i;
    }
    if (!o.contains("group") || !o["group"].is_string() ||
        (o["group"] != "meso" && o["group"] != "macro")) {
      rd.fail(path + ".group", "expected \"meso\" or \"macro\"");
    } else {
      sp.group = o["group"] == "macro" ? ScaleGroup::Macro : ScaleGroup::Meso;
    }
    if (o.contains("mu"))
      if (auto r = rd.rational(o["mu"], path + ".mu")) sp.transport_exponent = *r;
    if (o.contains("hop_rate")) {
      auto v = rd.number(o["hop_rate"], path + ".hop_rate");
      if (v && *v < 0.0) rd.fail(path + ".hop_rate", "must be >= 0");
      if (v) sp.base_hop_rate = *v;
    }
    if (o.contains("initial")) {
      const auto& ji = o["initial"];
      if (ji.is_string() && ji == "standard") {
      } else if (ji.is_array()) {
        std::vector<double> vals;
        for (std::size_t j = 0; j < ji.size(); ++j) {
          const auto p = path + ".initial[" + std::to_string(j) + "]";
          auto v = rd.number(ji[j], p);
          if (!v) continue;
          if (*v < 0.0) rd.fail(p, "must be >= 0");
          if (sp.group == ScaleGroup::Meso && *v != std::floor(*v))
            rd.fail(p, "meso counts must be integers");
          vals.push_back(*v);
        }
        if (ji.size() != cm.voxels)
          rd.fail(path + ".initial", "expected " + std::to_string(cm.voxels) + " values, one per voxel");
        cm.initial.back() = vals;
      } else {
        rd.fail(path + ".initial", "expected \"standard\" or an array of per-voxel values");
      }
    }
  }

  auto species_ref = [&](const json& j, const std::string& path) -> std::optional<std::size_t> {
    if (!j.is_string()) {
      rd.fail(path, "expected a species name");
      return std::nullopt;
    }
    auto it = names.find(j.get<std::string>());
    if (it == names.end()) {
      rd.fail(path, "unknown species \"" + j.get<std::string>() + "\"");
      return std::nullopt;
    }
    return it->second;
  };

  if (!jm.contains("reactions")) return cm;
  if (!jm["reactions"].is_array()) {
    rd.fail("model.reactions", "expected an array");
    return cm;
  }
  const auto& jr = jm["reactions"];
  for (std::size_t r = 0; r < jr.size(); ++r) {
    const auto path = "model.reactions[" + std::to_string(r) + "]";
    if (!rd.object(jr[r], path, {"kind", "reactants", "k", "p", "stoich"})) continue;
    const auto& o = jr[r];
    ReactionDef def;
    def.stoich = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(js.size()));
    static const std::map<std::string, std::pair<RateKind, std::size_t>> kinds{
        {"constant", {RateKind::Constant, 0}},
        {"unary", {RateKind::Unary, 1}},
        {"binary", {RateKind::BinaryHetero, 2}},
        {"binary-homo", {RateKind::BinaryHomo, 1}}};
    std::size_t arity = 0;
    if (!o.contains("kind") || !o["kind"].is_string() || !kinds.count(o["kind"].get<std::string>())) {
      rd.fail(path + ".kind", "expected one of constant, unary, binary, binary-homo");
    } else {
      const auto& [kind, n] = kinds.at(o["kind"].get<std::string>());
      def.rate_law.kind = kind;
      arity = n;
      const json empty = json::array();
      const json& reac = o.contains("reactants") ? o["reactants"] : empty;
      if (!reac.is_array() || reac.size() != arity) {
        rd.fail(path + ".reactants", "kind " + o["kind"].get<std::string>() + " takes " +
                                         std::to_string(arity) + " reactant(s)");
      } else {
        if (arity >= 1)
          if (auto a = species_ref(reac[0], path + ".reactants[0]")) def.rate_law.species_a = *a;
        if (arity >= 2)
          if (auto b = species_ref(reac[1], path + ".reactants[1]")) def.rate_law.species_b = *b;
      }
    }
    if (!o.contains("k")) {
      rd.fail(path + ".k", "missing rate constant");
    } else if (auto k = rd.number(o["k"], path + ".k")) {
      if (*k < 0.0) rd.fail(path + ".k", "must be >= 0");
      def.rate_law.base_constant = *k;
    }
    if (o.contains("p"))
      if (auto p = rd.rational(o["p"], path + ".p")) def.rate_law.epsilon_exponent = *p;
    if (!o.contains("stoich") || !o["stoich"].is_object()) {
      rd.fail(path + ".stoich", "expected an object mapping species to integer changes");
    } else {
      for (const auto& [name, val] : o["stoich"].items()) {
        const auto p = path + ".stoich." + name;
        auto i = species_ref(json(name), p);
        if (!val.is_number_integer()) {
          rd.fail(p, "expected an integer");
          continue;
        }
        if (i) def.stoich[static_cast<Eigen::Index>(*i)] = val.get<int>();
      }
    }
    cm.model.reactions.push_back(std::move(def));
  }
  return cm;
}

void read_experiment(Reader& rd, const json& je, ExperimentConfig& ex) {
  if (!rd.object(je, "experiment",
                 {"epsilon", "eps_grid", "h_grid", "h", "replicates", "final_time", "sample_dt",
                  "seed", "threads", "ode_step", "event_tol", "ode_substeps"}))
    return;
  if (je.contains("epsilon")) {
    ex.epsilon = rd.positive(je["epsilon"], "experiment.epsilon");
    if (ex.epsilon && *ex.epsilon > 1.0) rd.fail("experiment.epsilon", "epsilon must lie in (0, 1]");
  }
  if (je.contains("eps_grid")) ex.eps_grid = rd.grid(je["eps_grid"], "experiment.eps_grid", true);
  if (je.contains("h_grid")) ex.h_grid = rd.grid(je["h_grid"], "experiment.h_grid", false);
  if (je.contains("h")) ex.h = rd.positive(je["h"], "experiment.h");
  if (je.contains("replicates")) {
    auto n = rd.count(je["replicates"], "experiment.replicates");
    if (n && *n < 2) rd.fail("experiment.replicates", "need at least 2 replicates");
    if (n) ex.replicates = static_cast<std::size_t>(*n);
  }
  if (je.contains("final_time")) ex.final_time = rd.positive(je["final_time"], "experiment.final_time");
  if (je.contains("sample_dt")) {
    auto v = rd.number(je["sample_dt"], "experiment.sample_dt");
    if (v && *v < 0.0) rd.fail("experiment.sample_dt", "must be >= 0");
    ex.sample_dt = v;
  }
  if (je.contains("seed")) ex.seed = rd.count(je["seed"], "experiment.seed");
  if (je.contains("threads")) {
    auto n = rd.count(je["threads"], "experiment.threads");
    if (n && *n < 1) rd.fail("experiment.threads", "need at least 1 thread");
    if (n) ex.threads = static_cast<unsigned>(*n);
  }
  if (je.contains("ode_step"))
    if (auto v = rd.positive(je["ode_step"], "experiment.ode_step")) ex.hybrid.ode_step = *v;
  if (je.contains("event_tol"))
    if (auto v = rd.positive(je["event_tol"], "experiment.event_tol")) ex.hybrid.event_tol = *v;
  if (je.contains("ode_substeps")) {
    auto n = rd.count(je["ode_substeps"], "experiment.ode_substeps");
    if (n && *n < 1) rd.fail("experiment.ode_substeps", "need at least 1 substep");
    if (n) ex.ode_substeps = static_cast<int>(*n);
  }
}

}  // namespace

Scenario RunConfig::scenario(double epsilon) const {
  if (const auto* b = std::get_if<BuiltinName>(&model)) {
    switch (*b) {
      case BuiltinName::Isomerization:
        return builtin_isomerization(epsilon);
      case BuiltinName::CatalyticConvergent:
        return builtin_catalytic(epsilon, Orientation::Convergent);
      case BuiltinName::CatalyticDivergent:
        return builtin_catalytic(epsilon, Orientation::Divergent);
    }
  }
  const auto& cm = std::get<CustomModel>(model);
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  Scenario sc;
  sc.model = cm.model;
  sc.model.epsilon = epsilon;
  sc.model.validate();
  std::vector<double> hops;
  for (const auto& s : sc.model.species) hops.push_back(s.base_hop_rate);
  sc.mesh = periodic_1d_mesh(cm.voxels, cm.length, hops);
  sc.init = standard_initial_state(sc.model, cm.voxels);
  for (std::size_t i = 0; i < cm.initial.size(); ++i) {
    const auto* vals = std::get_if<std::vector<double>>(&cm.initial[i]);
    if (!vals) continue;
    const auto row = static_cast<Eigen::Index>(sc.model.group_row(i));
    for (std::size_t j = 0; j < vals->size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (sc.model.is_macro(i))
        sc.init.macro_values(row, jj) = std::round((*vals)[j] / epsilon) * epsilon;
      else
        sc.init.meso_counts(row, jj) = static_cast<std::int64_t>((*vals)[j]);
    }
  }
  return sc;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }
  Reader rd;
  RunConfig cfg;
  if (!rd.object(doc, "$", {"builtin", "model", "mesh", "experiment", "output"}))
    throw ConfigError(rd.issues);
  const bool has_builtin = doc.contains("builtin");
  const bool has_model = doc.contains("model");
  if (has_builtin == has_model) {
    rd.fail("$", "give exactly one of \"builtin\" and \"model\"");
  } else if (has_builtin) {
    const auto& b = doc["builtin"];
    std::optional<BuiltinName> name;
    if (b.is_string()) name = builtin_from(b.get<std::string>());
    if (!name)
      rd.fail("builtin", "expected isomerization, catalytic-convergent or catalytic-divergent");
    else
      cfg.model = *name;
    if (doc.contains("mesh")) rd.fail("mesh", "builtin models fix their own geometry");
  } else {
    auto cm = read_model(rd, doc["model"], doc.contains("mesh") ? &doc["mesh"] : nullptr);
    if (rd.issues.empty()) {
      cm.model.epsilon = 1.0;
      try {
        cm.model.validate();
      } catch (const ContractViolation& e) {
        rd.fail("model", e.what());
      }
    }
    cfg.model = std::move(cm);
  }
  if (doc.contains("experiment")) read_experiment(rd, doc["experiment"], cfg.experiment);
  if (doc.contains("output")) {
    if (!doc["output"].is_string() || doc["output"].get<std::string>().empty())
      rd.fail("output", "expected a directory path");
    else
      cfg.output = doc["output"].get<std::string>();
  }
  if (!rd.issues.empty()) throw ConfigError(rd.issues);
  return cfg;
}

}  // namespace hybridrd
