#include <algorithm>

#include "doctest.h"
#include "generators.hpp"
#include "pmdp/arena.hpp"
#include "pmdp/errors.hpp"
#include "pmdp/games.hpp"
#include "pmdp/json_io.hpp"

using namespace pmdp;
using nlohmann::json;

TEST_CASE("arena fixture parses with names, owners, ranks, costs intact") {
  const ParityMDP m = pmdp::testsupport::load_fixture_arena("fig1.json");
  REQUIRE(m.size() == 4);
  CHECK(m.initial == 0);
  CHECK(m.states[0].name == "q0");
  CHECK(m.states[0].owner == 1);
  CHECK(m.states[0].rank == 1);
  CHECK(m.states[0].cost == Rational(1));
  CHECK(m.states[2].name == "m");
  CHECK(m.states[2].owner == 2);
  CHECK(m.states[2].actions.size() == 2);
  CHECK(m.states[2].actions[0].prob == Rational(1, 2));
  CHECK(m.states[3].rank == 2);
  CHECK(m.max_rank() == 2);
  CHECK(m.max_cost() == Rational(10));
  CHECK(m.state_by_name("m2") == 3);
  CHECK_FALSE(m.state_by_name("nope").has_value());
  CHECK(validate(m).empty());
}

TEST_CASE("parser rejects malformed arenas") {
  // environment edge without probability
  json j = {{"states",
             {{{"id", 0}, {"owner", 2}, {"rank", 0}, {"cost", 0}}}},
            {"initial", 0},
            {"transitions", {{{"from", 0}, {"action", "u"}, {"to", 0}}}}};
  CHECK_THROWS_AS(parse_arena(j), ParseError);

  // system edge with probability
  j = {{"states", {{{"id", 0}, {"owner", 1}, {"rank", 0}, {"cost", 0}}}},
       {"initial", 0},
       {"transitions", {{{"from", 0}, {"action", "a"}, {"to", 0}, {"prob", "1"}}}}};
  CHECK_THROWS_AS(parse_arena(j), ParseError);

  // duplicate action name on one state
  j = {{"states", {{{"id", 0}, {"owner", 1}, {"rank", 0}, {"cost", 0}}}},
       {"initial", 0},
       {"transitions",
        {{{"from", 0}, {"action", "a"}, {"to", 0}},
         {{"from", 0}, {"action", "a"}, {"to", 0}}}}};
  CHECK_THROWS_AS(parse_arena(j), ParseError);

  // decimal cost literals are not exact
  j = {{"states", {{{"id", 0}, {"owner", 1}, {"rank", 0}, {"cost", 0.5}}}},
       {"initial", 0},
       {"transitions", {{{"from", 0}, {"action", "a"}, {"to", 0}}}}};
  CHECK_THROWS_AS(parse_arena(j), ParseError);
}

TEST_CASE("validate reports structural problems") {
  ParityMDP m = pmdp::testsupport::load_fixture_arena("fig1.json");
  m.states[2].actions[0].prob = Rational(1, 3);  // mass now 5/6
  auto diags = validate(m);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].state == 2);
  CHECK(diags[0].message.find("sum") != std::string::npos);
  CHECK_THROWS_AS(require_valid(m), DomainError);

  m = pmdp::testsupport::load_fixture_arena("fig1.json");
  m.states[1].actions.clear();
  diags = validate(m);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].state == 1);
}

TEST_CASE("attractors on the running example") {
  const ParityMDP m = pmdp::testsupport::load_fixture_arena("fig1.json");
  // the controller can steer everything into q1 (via c at q0)
  CHECK(sys_attractor(m, {1}) == std::vector<int>{0, 1, 2, 3});
  // the environment forces m2 from m with probability 1/2, nothing else helps it
  CHECK(env_attractor(m, {3}) == std::vector<int>{2, 3});
  // q0 self-loop: the environment cannot force q1 at all
  CHECK(env_attractor(m, {1}) == std::vector<int>{1});
}

TEST_CASE("restriction drops leaving actions and checks closure") {
  const ParityMDP m = pmdp::testsupport::load_fixture_arena("fig1.json");
  const ParityMDP sub = restrict_arena(m, {0, 2, 3});
  REQUIRE(sub.size() == 3);
  CHECK(sub.states[0].name == "q0");
  // action c (to q1) is gone, a and b stay
  CHECK(sub.states[0].actions.size() == 2);
  CHECK(sub.source_ids == std::vector<int>{0, 2, 3});
  CHECK(validate(sub).empty());

  // dropping m2 strands probability mass of m
  CHECK_THROWS_AS(restrict_arena(m, {0, 1, 2}), DomainError);
  // q1 alone is fine, and becomes initial
  const ParityMDP solo = restrict_arena(m, {1});
  CHECK(solo.size() == 1);
  CHECK(solo.initial == 0);
}

TEST_CASE("projections erase the right structure") {
  const ParityMDP m = pmdp::testsupport::load_fixture_arena("fig1.json");
  const ParityMDP mdp = project_mdp(m);
  for (const auto& s : mdp.states) CHECK(s.rank == 0);
  CHECK(mdp.size() == m.size());

  const ParityGame g = project_game(m);
  REQUIRE(g.size() == 4);
  CHECK(g.states[0].owner == 1);
  CHECK(g.states[2].owner == 2);
  CHECK(g.states[2].rank == 1);
  // environment actions become plain edges
  CHECK(g.states[2].actions.size() == 2);
}

TEST_CASE("zero-probability environment edges survive only the game view") {
  ParityMDP m = pmdp::testsupport::load_fixture_arena("fig1.json");
  // give m an extra zero-probability escape to q1
  m.states[2].actions.push_back({2, "z", 1, Rational(0)});
  REQUIRE(validate(m).empty());
  const ParityGame g = project_game(m);
  CHECK(g.states[2].actions.size() == 3);
  // but the environment attractor (MDP reading) still ignores it
  CHECK(env_attractor(m, {1}) == std::vector<int>{1});
}

TEST_CASE("arena serialization round-trips") {
  const ParityMDP m = pmdp::testsupport::load_fixture_arena("fig1.json");
  const ParityMDP back = parse_arena(arena_to_json(m));
  REQUIRE(back.size() == m.size());
  CHECK(back.initial == m.initial);
  for (int i = 0; i < m.size(); ++i) {
    CHECK(back.states[i].name == m.states[i].name);
    CHECK(back.states[i].owner == m.states[i].owner);
    CHECK(back.states[i].rank == m.states[i].rank);
    CHECK(back.states[i].cost == m.states[i].cost);
    REQUIRE(back.states[i].actions.size() == m.states[i].actions.size());
    for (std::size_t a = 0; a < m.states[i].actions.size(); ++a) {
      CHECK(back.states[i].actions[a].name == m.states[i].actions[a].name);
      CHECK(back.states[i].actions[a].to == m.states[i].actions[a].to);
      CHECK(back.states[i].actions[a].prob == m.states[i].actions[a].prob);
    }
  }
  // serialize-parse-serialize is a fixpoint
  CHECK(arena_to_json(back) == arena_to_json(m));
}

TEST_CASE("strategy JSON round-trips") {
  const ParityMDP m = pmdp::testsupport::load_fixture_arena("fig1.json");

  MemorylessStrategy pos;
  pos.action = {2, 0, -1, -1};  // q0 -> c, q1 -> a
  const json j = memoryless_to_json(m, pos);
  CHECK(j.at("kind") == "memoryless");
  const FiniteMemoryStrategy f = parse_strategy(m, j);
  CHECK(f.memory_count == 1);
  CHECK(f.action_at(0, 0) == 2);
  CHECK(f.action_at(1, 0) == 0);
  CHECK(f.action_at(2, 0) == -1);

  FiniteMemoryStrategy fm;
  fm.memory_count = 2;
  fm.initial_memory = 0;
  fm.next = {{1, 1}, {0, 1}, {0, 0}, {1, 0}};
  fm.act = {{0, 2}, {0, 0}, {-1, -1}, {-1, -1}};
  const json jf = finite_to_json(m, fm);
  const FiniteMemoryStrategy back = parse_strategy(m, jf);
  CHECK(back.memory_count == 2);
  CHECK(back.initial_memory == 0);
  CHECK(back.next == fm.next);
  CHECK(back.act == fm.act);

  // unknown action names are rejected
  json bad = {{"kind", "memoryless"}, {"actions", {{"q0", "zz"}}}};
  CHECK_THROWS_AS(parse_strategy(m, bad), ParseError);
}

TEST_CASE("content digest is the 64-bit FNV-1a of the bytes") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("abc") == "e71fa2190541574b");
  CHECK(fnv1a64_hex("abc") == fnv1a64_hex("abc"));
  CHECK(fnv1a64_hex("abd") != fnv1a64_hex("abc"));
}
