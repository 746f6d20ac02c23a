#include "pmdp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmdp/arena.hpp"
#include "pmdp/decomposition.hpp"
#include "pmdp/errors.hpp"
#include "pmdp/games.hpp"
#include "pmdp/json_io.hpp"
#include "pmdp/mdp.hpp"
#include "pmdp/strategy.hpp"
#include "pmdp/surecost.hpp"
#include "pmdp/synthesis.hpp"

namespace pmdp {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct LoadedFile {
  std::string digest;  // "fnv1a64:<16 hex>" over the raw bytes
  json j;
};

LoadedFile read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  LoadedFile lf;
  lf.digest = "fnv1a64:" + fnv1a64_hex(bytes);
  try {
    lf.j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ParseError(path + ": bad JSON: " + e.what());
  }
  return lf;
}

json make_report(const std::string& command, json args, const std::string& digest) {
  json rep;
  rep["tool"] = "paritymdp";
  rep["version"] = kVersion;
  rep["command"] = command;
  rep["args"] = std::move(args);
  rep["inputDigest"] = digest;
  rep["ok"] = true;
  return rep;
}

json names_of(const ParityMDP& m, const std::vector<int>& ids) {
  json arr = json::array();
  for (int s : ids) arr.push_back(m.states[s].name);
  return arr;
}

json components_to_json(const ParityMDP& m, const std::vector<EndComponent>& cs) {
  json arr = json::array();
  for (const EndComponent& c : cs) arr.push_back(names_of(m, c.states));
  return arr;
}

json valued_components_to_json(const ParityMDP& m, const std::vector<ValuedComponent>& cs) {
  json arr = json::array();
  for (const ValuedComponent& c : cs) {
    arr.push_back({{"states", names_of(m, c.component.states)}, {"value", c.value.str()}});
  }
  return arr;
}

json surecost_to_json(const ParityMDP& m, const SureCostResult& r) {
  json res;
  res["realizable"] = r.realizable;
  if (r.realizable) {
    res["value"] = r.value.str();
  } else {
    res["value"] = nullptr;
  }
  res["winning"] = names_of(m, r.winning);
  res["pruned"] = names_of(m, r.pruned);
  res["components"] = valued_components_to_json(m, r.components);
  if (!r.winning.empty()) {
    res["parityStrategy"] = memoryless_to_json(m, r.parity_strategy);
    res["meanPayoffStrategy"] = memoryless_to_json(m, r.mprime.strategy);
  }
  return res;
}

json game_strategy_to_json(const ParityGame& g, const MemorylessStrategy& f) {
  json actions = json::object();
  for (int s = 0; s < g.size(); ++s) {
    if (s < static_cast<int>(f.action.size()) && f.action[s] >= 0) {
      actions[g.states[s].name] = g.states[s].actions[f.action[s]].name;
    }
  }
  return actions;
}

std::vector<int> parse_component_names(const ParityMDP& m, const std::string& list) {
  std::vector<int> ids;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const std::optional<int> id = m.state_by_name(tok);
    if (!id) throw DomainError("UnknownState", "no state named \"" + tok + "\"");
    ids.push_back(*id);
  }
  if (ids.empty()) throw ParseError("--component needs a comma-separated list of state names");
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

int worker_count(int jobs) {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap <= 0) cap = 1;
  if (const char* env = std::getenv("PARITYMDP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = std::min(cap, v);
  }
  return std::max(1, std::min(cap, jobs));
}

MeanSchedule schedule_from_name(const std::string& name) {
  if (name == "pow2") return MeanSchedule::Pow2;
  if (name == "pow4") return MeanSchedule::Pow4;
  return MeanSchedule::DoubleExp;
}

void enforce_signal_limit(const SignalAlphabet& a, int max_signals) {
  if (static_cast<int>(a.inputs.size()) > max_signals ||
      static_cast<int>(a.outputs.size()) > max_signals) {
    throw DomainError("TooManySignals",
                      "alphabet exceeds --max-signals=" + std::to_string(max_signals));
  }
}

// A parity game reshaped as an arena so the strategy file parser (which
// resolves state and action names) can be reused; probabilities are a
// uniform placeholder, never consulted by the extraction.
ParityMDP game_as_arena(const ParityGame& g) {
  ParityMDP m;
  m.initial = g.initial;
  m.states.resize(g.size());
  for (int s = 0; s < g.size(); ++s) {
    State& st = m.states[s];
    st.id = s;
    st.name = g.states[s].name;
    st.owner = g.states[s].owner;
    st.rank = g.states[s].rank;
    const auto& acts = g.states[s].actions;
    const Rational p(1, std::max<long>(1, static_cast<long>(acts.size())));
    for (const GameAction& a : acts) {
      m.states[s].actions.push_back(
          {a.id, a.name, a.to, st.owner == 2 ? p : Rational()});
    }
  }
  return m;
}

struct CliOptions {
  std::string file;
  std::string memory;
  std::string mode;
  std::string component;
  std::string strategy;
  std::string schedule = "pow4";
  std::string game_kind = "sensing";
  std::string epsilon = "1/10";
  std::string fixtures = "fixtures";
  std::uint64_t horizon = 1000000;
  std::uint64_t seed = 1;
  std::uint64_t n0 = 1000000;
  int seeds = 1;
  long gamma = 4;
  int max_signals = 4;
  bool pre_determinized = false;
  bool dot = false;
};

int cmd_validate(const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  const ParityMDP m = parse_arena(lf.j);
  const std::vector<Diagnostic> ds = validate(m);
  json rep = make_report("validate", json{{"file", opt.file}}, lf.digest);
  json list = json::array();
  for (const Diagnostic& d : ds) {
    json e;
    e["message"] = d.message;
    if (d.state >= 0) {
      e["state"] = d.state;
    } else {
      e["state"] = nullptr;
    }
    list.push_back(std::move(e));
  }
  rep["result"] = {{"valid", ds.empty()}, {"diagnostics", list}};
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_components(const std::string& name, const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  const ParityMDP m = parse_arena(lf.j);
  require_valid(m);
  const auto comps = name == "mec" ? max_end_components(m) : max_gecs(m);
  json rep = make_report(name, json{{"file", opt.file}}, lf.digest);
  rep["result"] = {{"components", components_to_json(m, comps)}};
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_sgec_check(const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  const ParityMDP m = parse_arena(lf.j);
  require_valid(m);
  json args{{"file", opt.file}};
  json result;
  if (opt.component.empty()) {
    result["components"] = components_to_json(m, max_sgecs(m));
  } else {
    args["component"] = opt.component;
    EndComponent c;
    c.states = parse_component_names(m, opt.component);
    const SuperGoodResult r = super_good_states(m, c);
    result["isSgec"] = r.is_sgec;
    result["superGood"] = names_of(m, r.super_good);
    result["witness"] = r.witness ? finite_to_json(m, *r.witness) : json(nullptr);
  }
  json rep = make_report("sgec-check", std::move(args), lf.digest);
  rep["result"] = std::move(result);
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_parity(const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  const ParityMDP m = parse_arena(lf.j);
  require_valid(m);
  const ParityGame g = project_game(m);
  const GameSolution sol = solve_parity(g);
  json rep = make_report("parity", json{{"file", opt.file}}, lf.digest);
  rep["result"] = {{"w1", names_of(m, sol.w1)},
                   {"w2", names_of(m, sol.w2)},
                   {"strategy1", game_strategy_to_json(g, sol.strategy1)},
                   {"strategy2", game_strategy_to_json(g, sol.strategy2)}};
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_mdp_value(const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  const ParityMDP m = parse_arena(lf.j);
  require_valid(m);
  json args{{"file", opt.file}};
  json result;
  if (opt.component.empty()) {
    const MeanPayoffSolution sol = min_mean_payoff(m);
    json gain = json::object();
    json bias = json::object();
    for (int s = 0; s < m.size(); ++s) {
      gain[m.states[s].name] = sol.gain[s].str();
      bias[m.states[s].name] = sol.bias[s].str();
    }
    result = {{"gain", gain}, {"bias", bias}, {"strategy", memoryless_to_json(m, sol.strategy)}};
  } else {
    args["component"] = opt.component;
    EndComponent c;
    c.states = parse_component_names(m, opt.component);
    const EcSolution sol = ec_solve(m, c);
    result = {{"value", sol.value.str()}, {"strategy", memoryless_to_json(m, sol.strategy)}};
  }
  json rep = make_report("mdp-value", std::move(args), lf.digest);
  rep["result"] = std::move(result);
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_solve(const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  const ParityMDP m = parse_arena(lf.j);
  const bool finite = opt.memory == "finite";
  const SureCostResult r = finite ? cost_sure_finite(m) : cost_sure_infinite(m);
  json rep = make_report("solve", json{{"file", opt.file}, {"memory", opt.memory}}, lf.digest);
  rep["result"] = surecost_to_json(m, r);
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  const ParityMDP m = parse_arena(lf.j);
  require_valid(m);

  ScheduleParams params;
  params.mean = schedule_from_name(opt.schedule);
  params.gamma = opt.gamma;

  json args{{"file", opt.file},      {"strategy", opt.strategy}, {"horizon", opt.horizon},
            {"seed", opt.seed},      {"seeds", opt.seeds},       {"schedule", opt.schedule},
            {"gamma", opt.gamma}};
  std::string digest = lf.digest;

  std::function<std::unique_ptr<StrategyRunner>()> factory;
  if (opt.strategy == "@gec") {
    if (opt.component.empty()) throw ParseError("simulate with @gec needs --component");
    args["component"] = opt.component;
    EndComponent c;
    c.states = parse_component_names(m, opt.component);
    const ProceduralStrategy proto = epsilon_strategy_gec(m, c, params);
    factory = [proto]() { return std::make_unique<ProceduralStrategy>(proto); };
  } else if (opt.strategy == "@global") {
    args["epsilon"] = opt.epsilon;
    args["n0"] = opt.n0;
    const Rational eps = Rational::from_string(opt.epsilon);
    const ProceduralStrategy proto = global_epsilon_strategy(m, eps, opt.n0, params);
    factory = [proto]() { return std::make_unique<ProceduralStrategy>(proto); };
  } else {
    const LoadedFile sf = read_json_file(opt.strategy);
    digest += "+" + sf.digest;
    const FiniteMemoryStrategy f = parse_strategy(m, sf.j);
    factory = [&m, f]() { return std::make_unique<FiniteMemoryRunner>(m, f); };
  }

  const std::vector<TrajectoryStats> stats =
      simulate_many(m, factory, opt.horizon, opt.seed, opt.seeds, worker_count(opt.seeds));

  json rows = json::array();
  Rational total;
  for (const TrajectoryStats& t : stats) {
    total += t.mean_cost;
    rows.push_back({{"seed", t.seed},
                    {"meanCost", t.mean_cost.str()},
                    {"maxSuffixRank", t.max_suffix_rank},
                    {"suffixVisited", names_of(m, t.suffix_visited)}});
  }
  json rep = make_report("simulate", std::move(args), digest);
  rep["result"] = {{"trajectories", rows},
                   {"aggregateMeanCost", (total / Rational(opt.seeds)).str()}};
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_penalties(const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  Dpw spec;
  const PenaltySpec ps = parse_penalty_bundle(lf.j, spec);
  enforce_signal_limit(spec.alphabet, opt.max_signals);
  const ParityMDP m = penalties_mdp(spec, ps);
  const bool finite = opt.memory == "finite";
  const SureCostResult r = finite ? cost_sure_finite(m) : cost_sure_infinite(m);
  json rep =
      make_report("penalties", json{{"file", opt.file}, {"memory", opt.memory}}, lf.digest);
  json res = surecost_to_json(m, r);
  res["productStates"] = m.size();
  rep["result"] = std::move(res);
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_sensing(const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  const Dpw a = parse_dpw(lf.j);
  enforce_signal_limit(a.alphabet, opt.max_signals);
  const bool finite = opt.mode == "finite";
  const SensingPipeline p =
      opt.pre_determinized ? sensing_cost_determinized(a, finite) : sensing_cost(a, finite);
  json rep = make_report(
      "sensing",
      json{{"file", opt.file}, {"mode", opt.mode}, {"preDeterminized", opt.pre_determinized}},
      lf.digest);
  json res;
  res["realizable"] = p.result.realizable;
  res["value"] = p.result.realizable ? json(p.result.value.str()) : json(nullptr);
  res["gameStates"] = p.game.arena.size();
  res["determinizedStates"] = p.determinized.size();
  if (!opt.pre_determinized) res["upwStates"] = p.upw.size();
  res["components"] = valued_components_to_json(p.game.arena, p.result.components);
  rep["result"] = std::move(res);
  out << rep.dump(2) << "\n";
  return 0;
}

int cmd_extract_transducer(const CliOptions& opt, std::ostream& out) {
  const LoadedFile lf = read_json_file(opt.file);
  const LoadedFile sf = read_json_file(opt.strategy);
  const Dpw a = parse_dpw(lf.j);
  enforce_signal_limit(a.alphabet, opt.max_signals);

  Transducer t;
  if (opt.game_kind == "synthesis") {
    const SynthesisGame g = dpw_to_game(a);
    const FiniteMemoryStrategy f = parse_strategy(game_as_arena(g.game), sf.j);
    t = extract_transducer(g, f);
  } else {
    const SensingGame sg = sensing_game(a);
    const FiniteMemoryStrategy f = parse_strategy(sg.arena, sf.j);
    t = extract_transducer(sg, f);
  }
  if (opt.dot) {
    out << transducer_to_dot(t);
    return 0;
  }
  json rep = make_report(
      "extract-transducer",
      json{{"file", opt.file}, {"strategy", opt.strategy}, {"game", opt.game_kind}},
      lf.digest + "+" + sf.digest);
  rep["result"] = {{"transducer", transducer_to_json(t)},
                   {"expectedSensingCost", transducer_expected_sensing_cost(t).str()}};
  out << rep.dump(2) << "\n";
  return 0;
}

// Fixture re-verification: every fixture file may carry an "expected"
// object; listed expectations are recomputed and compared exactly.
class FixtureChecker {
 public:
  explicit FixtureChecker(json& checks) : checks_(&checks) {}

  bool pass() const { return pass_; }

  void expect_str(const std::string& name, const std::string& expected,
                  const std::string& actual) {
    const bool ok = expected == actual;
    pass_ = pass_ && ok;
    checks_->push_back(
        {{"name", name}, {"expected", expected}, {"actual", actual}, {"pass", ok}});
  }

  void expect_int(const std::string& name, long expected, long actual) {
    const bool ok = expected == actual;
    pass_ = pass_ && ok;
    checks_->push_back(
        {{"name", name}, {"expected", expected}, {"actual", actual}, {"pass", ok}});
  }

  void expect_bool(const std::string& name, bool expected, bool actual) {
    const bool ok = expected == actual;
    pass_ = pass_ && ok;
    checks_->push_back(
        {{"name", name}, {"expected", expected}, {"actual", actual}, {"pass", ok}});
  }

  void unknown_key(const std::string& key) {
    pass_ = false;
    checks_->push_back({{"name", key}, {"pass", false}, {"message", "unknown expected key"}});
  }

 private:
  json* checks_;
  bool pass_ = true;
};

void check_arena_fixture(const json& j, const json& expected, FixtureChecker& ck) {
  const ParityMDP m = parse_arena(j);
  for (const auto& [key, val] : expected.items()) {
    if (key == "costSureInfinite") {
      const SureCostResult r = cost_sure_infinite(m);
      ck.expect_str(key, val.get<std::string>(),
                    r.realizable ? r.value.str() : std::string("unrealizable"));
    } else if (key == "costSureFinite") {
      const SureCostResult r = cost_sure_finite(m);
      ck.expect_str(key, val.get<std::string>(),
                    r.realizable ? r.value.str() : std::string("unrealizable"));
    } else if (key == "realizable") {
      ck.expect_bool(key, val.get<bool>(), cost_sure_infinite(m).realizable);
    } else if (key == "mecCount") {
      ck.expect_int(key, val.get<long>(), static_cast<long>(max_end_components(m).size()));
    } else if (key == "sgecCount") {
      ck.expect_int(key, val.get<long>(), static_cast<long>(max_sgecs(m).size()));
    } else {
      ck.unknown_key(key);
    }
  }
}

void check_dpw_fixture(const json& j, const json& expected, FixtureChecker& ck) {
  const Dpw a = parse_dpw(j);
  auto pipeline = [&](bool finite) {
    return a.extended ? sensing_cost_determinized(a, finite) : sensing_cost(a, finite);
  };
  for (const auto& [key, val] : expected.items()) {
    if (key == "sensingCostInfinite" || key == "sensingCostFinite") {
      const SensingPipeline p = pipeline(key == "sensingCostFinite");
      ck.expect_str(key, val.get<std::string>(),
                    p.result.realizable ? p.result.value.str() : std::string("unrealizable"));
    } else if (key == "sensingGameStates") {
      ck.expect_int(key, val.get<long>(), pipeline(false).game.arena.size());
    } else if (key == "determinizedStates") {
      ck.expect_int(key, val.get<long>(), pipeline(false).determinized.size());
    } else if (key == "synthesisGameStates") {
      ck.expect_int(key, val.get<long>(), dpw_to_game(a).game.size());
    } else {
      ck.unknown_key(key);
    }
  }
}

void check_penalties_fixture(const json& j, const json& expected, FixtureChecker& ck) {
  Dpw spec;
  const PenaltySpec ps = parse_penalty_bundle(j, spec);
  const ParityMDP m = penalties_mdp(spec, ps);
  for (const auto& [key, val] : expected.items()) {
    if (key == "valueInfinite" || key == "valueFinite") {
      const SureCostResult r =
          key == "valueFinite" ? cost_sure_finite(m) : cost_sure_infinite(m);
      ck.expect_str(key, val.get<std::string>(),
                    r.realizable ? r.value.str() : std::string("unrealizable"));
    } else if (key == "productStates") {
      ck.expect_int(key, val.get<long>(), m.size());
    } else {
      ck.unknown_key(key);
    }
  }
}

int cmd_check(const CliOptions& opt, std::ostream& out) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  {
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(opt.fixtures, ec)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path().string());
    }
    if (ec) throw ParseError("cannot read fixture directory " + opt.fixtures);
  }
  std::sort(files.begin(), files.end());

  bool all_pass = true;
  std::string digest_seed;
  json rows = json::array();
  for (const std::string& path : files) {
    const LoadedFile lf = read_json_file(path);
    digest_seed += path + "=" + lf.digest + ";";
    const std::string base = fs::path(path).filename().string();
    if (!lf.j.is_object() || !lf.j.contains("expected")) {
      rows.push_back({{"file", base}, {"skipped", true}});
      continue;
    }
    json checks = json::array();
    FixtureChecker ck(checks);
    const json& expected = lf.j.at("expected");
    if (lf.j.contains("kind") && lf.j.at("kind") == "dpw") {
      check_dpw_fixture(lf.j, expected, ck);
    } else if (lf.j.contains("spec")) {
      check_penalties_fixture(lf.j, expected, ck);
    } else {
      check_arena_fixture(lf.j, expected, ck);
    }
    all_pass = all_pass && ck.pass();
    rows.push_back({{"file", base}, {"pass", ck.pass()}, {"checks", checks}});
  }

  json rep = make_report("check", json{{"fixtures", opt.fixtures}},
                         "fnv1a64:" + fnv1a64_hex(digest_seed));
  rep["ok"] = all_pass;
  rep["result"] = {{"pass", all_pass}, {"files", rows}};
  out << rep.dump(2) << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact solver for parity-MDPs: sure parity winning at minimal expected cost",
               "paritymdp"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);

  CliOptions opt;
  bool check_mode = false;
  app.add_flag("--check", check_mode, "re-verify the expected outputs of every fixture");
  app.add_option("--fixtures", opt.fixtures, "fixture directory for --check")
      ->capture_default_str();

  const auto add_file = [&](CLI::App* sub) {
    sub->add_option("file", opt.file, "input JSON file")->required();
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "structural checks of an arena file");
  add_file(validate_cmd);

  CLI::App* mec_cmd = app.add_subcommand("mec", "maximal end components");
  add_file(mec_cmd);

  CLI::App* gec_cmd = app.add_subcommand("gec", "maximal good end components");
  add_file(gec_cmd);

  CLI::App* sgec_cmd =
      app.add_subcommand("sgec-check", "super-good analysis of a component or the whole arena");
  add_file(sgec_cmd);
  sgec_cmd->add_option("--component", opt.component, "comma-separated state names");

  CLI::App* parity_cmd = app.add_subcommand("parity", "solve the parity game view");
  add_file(parity_cmd);

  CLI::App* mdp_cmd = app.add_subcommand("mdp-value", "minimal expected mean cost, parity ignored");
  add_file(mdp_cmd);
  mdp_cmd->add_option("--component", opt.component,
                      "restrict to an end component (comma-separated state names)");

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "minimal expected cost among surely winning strategies");
  add_file(solve_cmd);
  solve_cmd->add_option("--memory", opt.memory, "strategy class")
      ->required()
      ->check(CLI::IsMember({"infinite", "finite"}));

  CLI::App* sim_cmd = app.add_subcommand("simulate", "sample trajectories under a strategy");
  add_file(sim_cmd);
  sim_cmd->add_option("--strategy", opt.strategy,
                      "strategy file, or @gec / @global for the procedural strategies")
      ->required();
  sim_cmd->add_option("--component", opt.component, "component for @gec (state names)");
  sim_cmd->add_option("--horizon", opt.horizon, "steps per trajectory")->capture_default_str();
  sim_cmd->add_option("--seed", opt.seed, "base seed")->capture_default_str();
  sim_cmd->add_option("--seeds", opt.seeds, "number of trajectories")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--schedule", opt.schedule, "mean-phase growth")
      ->capture_default_str()
      ->check(CLI::IsMember({"pow2", "pow4", "dexp"}));
  sim_cmd->add_option("--gamma", opt.gamma, "reach-phase scale")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--n0", opt.n0, "mimic-phase budget for @global")->capture_default_str();
  sim_cmd->add_option("--epsilon", opt.epsilon, "advisory slack for @global")
      ->capture_default_str();

  CLI::App* pen_cmd = app.add_subcommand("penalties", "solve a penalty bundle");
  add_file(pen_cmd);
  pen_cmd->add_option("--memory", opt.memory, "strategy class")
      ->default_val(std::string("infinite"))
      ->check(CLI::IsMember({"infinite", "finite"}));
  pen_cmd->add_option("--max-signals", opt.max_signals, "alphabet size limit")
      ->capture_default_str();

  CLI::App* sense_cmd = app.add_subcommand("sensing", "expected sensing cost of a DPW");
  add_file(sense_cmd);
  sense_cmd->add_option("--mode", opt.mode, "strategy class")
      ->required()
      ->check(CLI::IsMember({"infinite", "finite"}));
  sense_cmd->add_flag("--pre-determinized", opt.pre_determinized,
                      "input is already a determinized extended-alphabet DPW");
  sense_cmd->add_option("--max-signals", opt.max_signals, "alphabet size limit")
      ->capture_default_str();

  CLI::App* ext_cmd =
      app.add_subcommand("extract-transducer", "fold a winning strategy into a transducer");
  add_file(ext_cmd);
  ext_cmd->add_option("--strategy", opt.strategy, "strategy JSON file")->required();
  ext_cmd->add_option("--game", opt.game_kind, "game construction the strategy lives on")
      ->capture_default_str()
      ->check(CLI::IsMember({"sensing", "synthesis"}));
  ext_cmd->add_flag("--dot", opt.dot, "emit GraphViz instead of JSON");
  ext_cmd->add_option("--max-signals", opt.max_signals, "alphabet size limit")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  std::string command;
  const auto started = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (validate_cmd->parsed()) {
      command = "validate";
      code = cmd_validate(opt, out);
    } else if (mec_cmd->parsed()) {
      command = "mec";
      code = cmd_components("mec", opt, out);
    } else if (gec_cmd->parsed()) {
      command = "gec";
      code = cmd_components("gec", opt, out);
    } else if (sgec_cmd->parsed()) {
      command = "sgec-check";
      code = cmd_sgec_check(opt, out);
    } else if (parity_cmd->parsed()) {
      command = "parity";
      code = cmd_parity(opt, out);
    } else if (mdp_cmd->parsed()) {
      command = "mdp-value";
      code = cmd_mdp_value(opt, out);
    } else if (solve_cmd->parsed()) {
      command = "solve";
      code = cmd_solve(opt, out);
    } else if (sim_cmd->parsed()) {
      command = "simulate";
      code = cmd_simulate(opt, out);
    } else if (pen_cmd->parsed()) {
      command = "penalties";
      code = cmd_penalties(opt, out);
    } else if (sense_cmd->parsed()) {
      command = "sensing";
      code = cmd_sensing(opt, out);
    } else if (ext_cmd->parsed()) {
      command = "extract-transducer";
      code = cmd_extract_transducer(opt, out);
    } else if (check_mode) {
      command = "check";
      code = cmd_check(opt, out);
    } else {
      err << app.help();
      return 2;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    json rep;
    rep["tool"] = "paritymdp";
    rep["version"] = kVersion;
    rep["command"] = command;
    rep["ok"] = false;
    rep["error"] = {{"code", e.code()}, {"message", e.what()}};
    out << rep.dump(2) << "\n";
    return 1;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  err << "timing: " << elapsed.count() << " ms\n";
  return code;
}

}  // namespace pmdp
