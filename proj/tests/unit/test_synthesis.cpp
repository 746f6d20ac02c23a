#include <algorithm>
#include <string>

#include "doctest.h"
#include "generators.hpp"
#include "pmdp/errors.hpp"
#include "pmdp/json_io.hpp"
#include "pmdp/strategy.hpp"
#include "pmdp/surecost.hpp"
#include "pmdp/synthesis.hpp"

using namespace pmdp;
using nlohmann::json;
using pmdp::testsupport::fixture_path;

namespace {

Dpw load_dpw(const std::string& name) {
  return parse_dpw(load_json_file(fixture_path(name)));
}

int id_by_name(const ParityMDP& m, const std::string& name) {
  const auto id = m.state_by_name(name);
  REQUIRE_MESSAGE(id.has_value(), "missing state " << name);
  return *id;
}

}  // namespace

TEST_CASE("automaton parsing reads the fixtures faithfully") {
  const Dpw echo = load_dpw("echo_dpw.json");
  CHECK(echo.size() == 4);
  CHECK_FALSE(echo.extended);
  CHECK(echo.letter_count() == 4);
  CHECK(echo.alphabet.inputs == std::vector<std::string>{"a"});
  CHECK(echo.alphabet.outputs == std::vector<std::string>{"b"});
  CHECK(echo.rank == std::vector<int>{0, 0, 0, 1});
  // from the start state the letter [a] leads to the "expect b" state
  CHECK(echo.delta[0][1] == 2);
  CHECK(echo.delta[0][0] == 1);

  const Dpw psi = load_dpw("psi_dpw.json");
  CHECK(psi.extended);
  CHECK(psi.size() == 4);
  CHECK(psi.letter_count() == 8);
  CHECK(psi.rank == std::vector<int>{1, 2, 0, 1});
}

TEST_CASE("automaton parsing rejects malformed input") {
  json j = load_json_file(fixture_path("echo_dpw.json"));
  j.erase("expected");

  // dropping one transition breaks totality
  json partial = j;
  partial["transitions"].erase(0);
  CHECK_THROWS_AS(parse_dpw(partial), ParseError);

  // duplicating one creates a conflict
  json dup = j;
  dup["transitions"].push_back(dup["transitions"][0]);
  CHECK_THROWS_AS(parse_dpw(dup), ParseError);

  // unknown signal in a letter
  json bad = j;
  bad["transitions"][0]["letter"] = json::array({"zz"});
  CHECK_THROWS_AS(parse_dpw(bad), ParseError);

  // standard automaton with an extended letter object
  json ext = j;
  ext["transitions"][0]["letter"] = {{"in", json::array()},
                                     {"sense", json::array()},
                                     {"out", json::array()}};
  CHECK_THROWS_AS(parse_dpw(ext), ParseError);

  // duplicate signal names across the alphabet
  json dupsig = j;
  dupsig["outputs"] = json::array({"a"});
  CHECK_THROWS_AS(parse_dpw(dupsig), ParseError);
}

TEST_CASE("automaton serialization round-trips") {
  for (const char* name : {"echo_dpw.json", "psi_dpw.json"}) {
    const Dpw a = load_dpw(name);
    const Dpw b = parse_dpw(dpw_to_json(a));
    CHECK(b.size() == a.size());
    CHECK(b.extended == a.extended);
    CHECK(b.initial == a.initial);
    CHECK(b.rank == a.rank);
    CHECK(b.delta == a.delta);
  }
  const Upw u = sensing_upw(load_dpw("echo_dpw.json"));
  const Upw v = parse_upw(upw_to_json(u));
  CHECK(v.delta == u.delta);
  CHECK(v.rank == u.rank);
  CHECK(v.extended);
}

TEST_CASE("reactive game of a standard specification") {
  const Dpw trivial = load_dpw("trivial_true_dpw.json");
  const SynthesisGame g = dpw_to_game(trivial);
  REQUIRE(g.game.size() == 3);
  CHECK(g.game.states[g.q_id(0)].name == "q0");
  CHECK(g.game.states[g.q_id(0)].owner == 2);
  CHECK(g.game.states[g.choice_id(0, 0)].name == "q0|-");
  CHECK(g.game.states[g.choice_id(0, 1)].name == "q0|a");
  CHECK(g.game.states[g.choice_id(0, 1)].owner == 1);

  // extended alphabets have no direct reactive reading
  CHECK_THROWS_AS(dpw_to_game(load_dpw("psi_dpw.json")), DomainError);
}

TEST_CASE("penalty product carries charges on both layers") {
  Dpw spec;
  const PenaltySpec pen =
      parse_penalty_bundle(load_json_file(fixture_path("penalties_rg.json")), spec);
  REQUIRE(pen.monitors.size() == 1);
  CHECK(pen.gamma == std::vector<long>{1});
  CHECK(spec.size() == 3);

  const ParityMDP prod = penalties_mdp(spec, pen);
  CHECK(prod.size() == 18);
  REQUIRE(validate(prod).empty());
  CHECK(prod.states[prod.initial].name == "q0.0");

  // monitor state 1 records "just emitted g": both copies pay one unit
  CHECK(prod.states[id_by_name(prod, "q1.1")].cost == Rational(1));
  CHECK(prod.states[id_by_name(prod, "q1.1|-")].cost == Rational(1));
  CHECK(prod.states[id_by_name(prod, "q0.0")].cost == Rational(0));
  CHECK(prod.states[id_by_name(prod, "q0.0|r")].cost == Rational(0));

  // the environment draws inputs uniformly
  for (const auto& a : prod.states[id_by_name(prod, "q0.0")].actions)
    CHECK(a.prob == Rational(1, 2));

  // and the optimum grants exactly every second step
  CHECK(cost_sure_infinite(prod).value == Rational(1, 2));
  CHECK(cost_sure_finite(prod).value == Rational(1, 2));

  PenaltySpec broken = pen;
  broken.gamma.clear();
  CHECK_THROWS_AS(penalties_mdp(spec, broken), ParseError);
}

TEST_CASE("sensing view and safety determinization of the echo language") {
  const Dpw echo = load_dpw("echo_dpw.json");
  const Upw u = sensing_upw(echo);
  CHECK(u.size() == 4);
  CHECK(u.extended);
  REQUIRE(u.delta[0].size() == 8);
  // unsensed letters leave both input branches open
  CHECK(u.delta[1][0] == std::vector<int>{1, 2});
  // sensed letters pin the branch
  CHECK(u.delta[1][2] == std::vector<int>{1});

  const Dpw d = determinize_safety(u);
  CHECK(d.size() == 5);
  CHECK(d.extended);
  CHECK(d.initial == 0);
  // rejecting subsets collapse to one absorbing rank-1 sink
  int sinks = 0;
  for (int q = 0; q < d.size(); ++q)
    if (d.rank[q] == 1) {
      ++sinks;
      for (int l = 0; l < 8; ++l) CHECK(d.delta[q][l] == q);
    }
  CHECK(sinks == 1);

  // the sensing view is standard-only, the arena extended-only
  CHECK_THROWS_AS(sensing_upw(load_dpw("psi_dpw.json")), DomainError);
  CHECK_THROWS_AS(sensing_game(echo), DomainError);

  Upw broken = u;
  broken.rank[0] = 2;
  CHECK_THROWS_AS(determinize_safety(broken), DomainError);
}

TEST_CASE("sensing arena layout") {
  const Dpw psi = load_dpw("psi_dpw.json");
  const SensingGame sg = sensing_game(psi);
  REQUIRE(sg.arena.size() == 25);
  CHECK(sg.arena.states[sg.start_id()].name == "start");
  CHECK(sg.arena.states[sg.start_id()].cost == Rational(0));
  CHECK(sg.arena.states[sg.start_id()].owner == 1);
  // environment states pay for the sensing they announce
  CHECK(sg.arena.states[sg.p2_id(0, 0)].cost == Rational(0));
  CHECK(sg.arena.states[sg.p2_id(0, 1)].cost == Rational(1));
  CHECK(sg.arena.states[sg.p2_id(0, 1)].owner == 2);
  CHECK(sg.arena.states[sg.p2_id(0, 1)].rank == psi.rank[0]);
  // unsensed environment states reveal nothing: one class, probability one
  REQUIRE(sg.arena.states[sg.p2_id(0, 0)].actions.size() == 1);
  CHECK(sg.arena.states[sg.p2_id(0, 0)].actions[0].prob == Rational(1));
  // sensed ones split into the two revealed classes
  REQUIRE(sg.arena.states[sg.p2_id(0, 1)].actions.size() == 2);
  CHECK(sg.arena.states[sg.p2_id(0, 1)].actions[0].prob == Rational(1, 2));
  REQUIRE(validate(sg.arena).empty());
}

TEST_CASE("sensing costs of the fixture languages") {
  const SensingPipeline echoInf = sensing_cost(load_dpw("echo_dpw.json"), false);
  const SensingPipeline echoFin = sensing_cost(load_dpw("echo_dpw.json"), true);
  CHECK(echoInf.result.realizable);
  CHECK(echoInf.result.value == Rational(1));
  CHECK(echoFin.result.value == Rational(1));
  CHECK(echoInf.game.arena.size() == 31);

  const Dpw psi = load_dpw("psi_dpw.json");
  const SensingPipeline psiInf = sensing_cost_determinized(psi, false);
  const SensingPipeline psiFin = sensing_cost_determinized(psi, true);
  CHECK(psiInf.result.realizable);
  // intermittent sensing pushes the long-run cost to zero...
  CHECK(psiInf.result.value == Rational(0));
  // ...but bounded memory must hold the verified-copy loop forever
  CHECK(psiFin.result.value == Rational(1));

  const SensingPipeline triv = sensing_cost(load_dpw("trivial_true_dpw.json"), false);
  CHECK(triv.result.value == Rational(0));
}

TEST_CASE("transducer of an echo strategy prices its sensing exactly") {
  const SensingPipeline pipe = sensing_cost(load_dpw("echo_dpw.json"), true);
  const ParityMDP& arena = pipe.game.arena;

  // always sense a; copy the remembered bit: subset state s2 = {expect no
  // b}, s3 = {expect b} in the determinization's visit order
  json strat = {{"kind", "memoryless"},
                {"actions",
                 {{"start", "a/-"},
                  {"s0|a|-", "a/-"},
                  {"s0|a|a", "a/-"},
                  {"s2|a|-", "a/-"},
                  {"s2|a|a", "a/-"},
                  {"s3|a|-", "a/b"},
                  {"s3|a|a", "a/b"}}}};
  const FiniteMemoryStrategy f = parse_strategy(arena, strat);

  const CertifyResult cert = certify_finite_strategy(arena, f);
  CHECK(cert.sure_winning);
  CHECK(cert.value == Rational(1));

  const Transducer t = extract_transducer(pipe.game, f);
  CHECK(t.size() == 5);
  CHECK(t.inputs == std::vector<std::string>{"a"});
  CHECK(t.outputs == std::vector<std::string>{"b"});
  for (int q = 0; q < t.size(); ++q) {
    // structural sensing never exceeds the announcement, and here the
    // output genuinely depends on the sensed bit everywhere
    CHECK((t.sensed[q] & ~t.declared_sensing[q]) == 0);
    CHECK(t.sensed[q] == 1);
    CHECK(t.declared_sensing[q] == 1);
  }

  // the independent chain pricing agrees with the certificate
  CHECK(transducer_expected_sensing_cost(t) == cert.value);

  // renders stay stable
  const json tj = transducer_to_json(t);
  CHECK(tj.at("states").size() == 5);
  const std::string dot = transducer_to_dot(t);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("sense: a") != std::string::npos);

  // a losing strategy is refused
  json lazy = strat;
  lazy["actions"]["s3|a|-"] = "a/-";  // breaks the promised echo
  CHECK_THROWS_AS(extract_transducer(pipe.game, parse_strategy(arena, lazy)),
                  DomainError);
}

TEST_CASE("transducer of a reactive-game strategy") {
  const Dpw trivial = load_dpw("trivial_true_dpw.json");
  const SynthesisGame g = dpw_to_game(trivial);
  FiniteMemoryStrategy f;
  f.memory_count = 1;
  f.initial_memory = 0;
  f.next.assign(3, {0});
  f.act = {{-1}, {0}, {1}};  // q0|- emits nothing, q0|a answers with b
  const Transducer t = extract_transducer(g, f);
  CHECK(t.size() == 2);
  // reactive strategies see the whole input valuation
  CHECK(t.declared_sensing[0] == 1);
  CHECK(t.sensed[0] == 1);
  CHECK(transducer_expected_sensing_cost(t) == Rational(1));

  // the indifferent strategy collapses to a single insensitive state
  FiniteMemoryStrategy mute = f;
  mute.act = {{-1}, {0}, {0}};
  const Transducer tm = extract_transducer(g, mute);
  CHECK(tm.size() == 1);
  CHECK(tm.declared_sensing[0] == 1);
  CHECK(tm.sensed[0] == 0);
  CHECK(transducer_expected_sensing_cost(tm) == Rational(0));
}

TEST_CASE("letter-space guards") {
  SignalAlphabet big;
  for (int i = 0; i < 10; ++i) big.inputs.push_back("i" + std::to_string(i));
  for (int i = 0; i < 10; ++i) big.outputs.push_back("o" + std::to_string(i));
  // 20 bits is the ceiling; the extended view adds the sensed-set bits
  CHECK_NOTHROW(require_enumerable(big, false));
  CHECK_THROWS_AS(require_enumerable(big, true), DomainError);
  big.inputs.push_back("i10");
  CHECK_THROWS_AS(require_enumerable(big, false), DomainError);
}
