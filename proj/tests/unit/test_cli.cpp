#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hybridrd/commands.hpp"
#include "hybridrd/config.hpp"

using namespace hybridrd;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> issues_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& what) {
  for (const auto& i : issues)
    if (i.find(what) != std::string::npos) return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hybridrd_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Ran {
  int code;
  std::string out;
  std::string err;
};

Ran run(Command c, const std::string& text, CommandOptions opt = {}) {
  opt.config_text = text;
  std::ostringstream out, err;
  const int code = run_command(c, parse_config(text), opt, out, err);
  return {code, out.str(), err.str()};
}

const char* kCustomIso = R"({
  "model": {
    "species": [
      {"name": "A", "group": "meso", "mu": 0, "hop_rate": 0.5},
      {"name": "B", "group": "macro"}
    ],
    "reactions": [
      {"kind": "unary", "reactants": ["A"], "k": 1, "stoich": {"A": 1, "B": -1}},
      {"kind": "unary", "reactants": ["B"], "k": 1, "p": "1", "stoich": {"A": -1, "B": 1}}
    ]
  },
  "mesh": {"voxels": 10, "length": 1},
  "experiment": {"epsilon": 0.1, "final_time": 0.5, "sample_dt": 0.25, "h": 0.25}
})";

}  // namespace

TEST_CASE("valid builtin config") {
  const auto cfg = parse_config(
      R"({"builtin": "isomerization", "experiment": {"eps_grid": [1e-1, 1e-2, 1e-3], "replicates": 100}})");
  CHECK(std::get<BuiltinName>(cfg.model) == BuiltinName::Isomerization);
  CHECK(cfg.experiment.eps_grid.size() == 3);
  CHECK(cfg.experiment.replicates == 100u);
}

TEST_CASE("config errors name the offending field") {
  CHECK(mentions(issues_of(R"({"builtin": "isomerization", "experiment": {"eps_grid": [1e-3, 1e-2, 1e-1]}})"),
                 "experiment.eps_grid: grid must be decreasing"));
  CHECK(mentions(issues_of(R"({"builtin": "isomerization", "colour": 1})"), "$.colour: unknown key"));
  CHECK(mentions(issues_of(R"({"builtin": "isomerisation"})"), "builtin"));
  CHECK(mentions(issues_of(R"({"builtin": "isomerization", "experiment": {"eps_grid": [0.1, 0.01]}})"),
                 "at least 3"));
  CHECK(mentions(issues_of("{\"builtin\": "), "syntax"));
  CHECK(mentions(issues_of(R"({})"), "exactly one"));
  CHECK(mentions(issues_of(R"({"builtin": "isomerization", "mesh": {"voxels": 4}})"), "mesh"));

  std::string neg = kCustomIso;
  neg.replace(neg.find("\"k\": 1,"), 7, "\"k\": -2,");
  CHECK(mentions(issues_of(neg), "model.reactions[0].k: must be >= 0"));

  std::string flt = kCustomIso;
  flt.replace(flt.find("\"p\": \"1\""), 8, "\"p\": 0.3");
  CHECK(mentions(issues_of(flt), "model.reactions[1].p: exponents must be exact rationals"));

  std::string unk = kCustomIso;
  unk.replace(unk.find("\"reactants\": [\"A\"]"), 18, "\"reactants\": [\"Q\"]");
  CHECK(mentions(issues_of(unk), "unknown species \"Q\""));

  std::string arity = kCustomIso;
  arity.replace(arity.find("\"kind\": \"unary\""), 15, "\"kind\": \"binary\"");
  CHECK(mentions(issues_of(arity), "model.reactions[0].reactants"));
}

TEST_CASE("custom model reproduces the builtin isomerization") {
  const auto custom = parse_config(kCustomIso);
  const auto sc = custom.scenario(0.1);
  const auto ref = builtin_isomerization(0.1);
  CHECK(sc.init == ref.init);
  CHECK(sc.mesh.edges[0].size() == ref.mesh.edges[0].size());
  const auto e = effective_exponents(sc.model);
  CHECK(e.u == Rational(0));
  CHECK(e.v == Rational(1));

  const auto a = scratch("custom");
  const auto b = scratch("builtin");
  std::string builtin_text = R"({"builtin": "isomerization",
    "experiment": {"epsilon": 0.1, "final_time": 0.5, "sample_dt": 0.25, "h": 0.25}})";
  CommandOptions oa;
  oa.out = a.string();
  CommandOptions ob;
  ob.out = b.string();
  CHECK(run(Command::Simulate, kCustomIso, oa).code == 0);
  CHECK(run(Command::Simulate, builtin_text, ob).code == 0);
  auto body = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
  CHECK(body(slurp(a / "trajectory.csv")) == body(slurp(b / "trajectory.csv")));
}

TEST_CASE("predict-orders and validate-mesh") {
  const auto r = run(Command::PredictOrders, R"({"builtin": "isomerization"})");
  CHECK(r.code == 0);
  CHECK(r.out.find("u = 0\nv = 1\n") == 0);
  CHECK(r.out.find("applicable = Unbounded") != std::string::npos);
  const auto d = run(Command::PredictOrders, R"({"builtin": "catalytic-divergent"})");
  CHECK(d.out.find("u = -3/4\nv = 0\n") == 0);
  CHECK(d.out.find("applicable = None") != std::string::npos);
  const auto m = run(Command::ValidateMesh, R"({"builtin": "catalytic-convergent"})");
  CHECK(m.code == 0);
  CHECK(m.out.find("m_V = 1\nM_V = 1\nM_D = 2\n") != std::string::npos);
}

TEST_CASE("sweep-epsilon smoke run") {
  const auto dir = scratch("sweep");
  const std::string text =
      R"({"builtin": "isomerization", "experiment": {"eps_grid": [0.1, 0.03, 0.01], "replicates": 10}})";
  CommandOptions opt;
  opt.out = dir.string();
  opt.seed = 17;
  const auto r = run(Command::SweepEpsilon, text, opt);
  CHECK(r.code == 0);
  std::istringstream csv(slurp(dir / "sweep_epsilon.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("# hybridrd ", 0) == 0);
  CHECK(line.find("seed=17") != std::string::npos);
  CHECK(line.find("config_fnv1a=") != std::string::npos);
  std::getline(csv, line);
  CHECK(line == "axis_value,group,rms,rms_stderr,M,S2,N");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    CHECK(line.find("nan") == std::string::npos);
    CHECK(line.find("inf") == std::string::npos);
    CHECK(line.substr(line.rfind(',') + 1) == "10");
  }
  CHECK(rows == 9);
  CHECK(fs::exists(dir / "sweep_epsilon_series.csv"));
  CHECK(r.out.find("slope meso = ") != std::string::npos);
}

TEST_CASE("outputs are byte identical across runs and thread counts") {
  const std::string text = R"({"builtin": "catalytic-convergent",
    "experiment": {"epsilon": 0.1, "h_grid": [0.5, 0.25, 0.125], "replicates": 8, "sample_dt": 0.5}})";
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  CommandOptions oa;
  oa.out = a.string();
  oa.threads = 1;
  CommandOptions ob;
  ob.out = b.string();
  ob.threads = 3;
  const auto ra = run(Command::SweepH, text, oa);
  const auto rb = run(Command::SweepH, text, ob);
  CHECK(ra.code == 0);
  CHECK(ra.out == rb.out);
  for (const char* f : {"sweep_h.csv", "sweep_h_series.csv", "sweep_h_summary.txt"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("command-level config problems exit with status 1") {
  CHECK(run(Command::SweepEpsilon, R"({"builtin": "isomerization"})").code == kExitConfig);
  CHECK(run(Command::SweepH, R"({"builtin": "isomerization", "experiment": {"h_grid": [0.5, 0.25, 0.125]}})").code ==
        kExitConfig);
  const auto dir = scratch("bad_h");
  CommandOptions opt;
  opt.out = dir.string();
  CHECK(run(Command::Simulate,
            R"({"builtin": "isomerization", "experiment": {"epsilon": 0.1, "h": 0.3, "sample_dt": 0.1}})", opt)
            .code == kExitConfig);
}

TEST_CASE("command names") {
  for (auto c : {Command::Simulate, Command::SweepEpsilon, Command::SweepH, Command::ValidateMesh,
                 Command::PredictOrders})
    CHECK(parse_command(to_string(c)) == c);
  CHECK_FALSE(parse_command("sweep"));
}

TEST_CASE("cli binary exit statuses") {
  const auto dir = scratch("binary");
  const auto good = dir / "good.json";
  const auto bad = dir / "bad.json";
  std::ofstream(good) << R"({"builtin": "isomerization"})";
  std::ofstream(bad) << R"({"builtin": "isomerization", "experiment": {"replicates": -3}})";
  const std::string cli = HYBRIDRD_CLI_PATH;
  const std::string quiet = " > " + (dir / "out.txt").string() + " 2>&1";
  auto status = [&](const std::string& args) {
    const int raw = std::system((cli + " " + args + quiet).c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("predict-orders --config " + good.string()) == 0);
  CHECK(status("predict-orders --config " + bad.string()) == 1);
  CHECK(status("frobnicate --config " + good.string()) == 1);
  CHECK(status("sweep-epsilon --config " + good.string()) == 1);
}
