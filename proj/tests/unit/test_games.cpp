#include <algorithm>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "pmdp/arena.hpp"
#include "pmdp/decomposition.hpp"
#include "pmdp/errors.hpp"
#include "pmdp/games.hpp"

using namespace pmdp;
using pmdp::testsupport::load_fixture_arena;
using pmdp::testsupport::random_accepting;
using pmdp::testsupport::random_parity_game;

namespace {

ParityGame two_loop_game() {
  // s (P1, rank 0) chooses between loop t (rank 1, accepting) and loop u
  // (rank 2, not accepting); both loops return to s.
  ParityGame g;
  g.states.resize(3);
  g.states[0] = {0, "s", 1, 0, {{0, "left", 1}, {1, "right", 2}}};
  g.states[1] = {1, "t", 1, 1, {{0, "back", 0}}};
  g.states[2] = {2, "u", 1, 2, {{0, "back", 0}}};
  g.initial = 0;
  return g;
}

}  // namespace

TEST_CASE("parity solving on tiny known games") {
  // one controller state, loop of rank 1: the only play is losing
  ParityGame g;
  g.states.resize(1);
  g.states[0] = {0, "s", 1, 1, {{0, "a", 0}}};
  g.initial = 0;
  GameSolution sol = solve_parity(g);
  CHECK(sol.w1.empty());
  CHECK(sol.w2 == std::vector<int>{0});

  // raise the rank to 2: now it is winning
  g.states[0].rank = 2;
  sol = solve_parity(g);
  CHECK(sol.w1 == std::vector<int>{0});
  CHECK(verify_memoryless_winning(g, sol.strategy1, sol.w1, 1));
}

TEST_CASE("parity solving on the projected running example") {
  const ParityMDP m = load_fixture_arena("fig1.json");
  const ParityGame g = project_game(m);
  const GameSolution sol = solve_parity(g);
  // playing c at q0 pins the top infinite rank at 2
  CHECK(sol.w1 == std::vector<int>{0, 1, 2, 3});
  CHECK(sol.w2.empty());
  CHECK(verify_memoryless_winning(g, sol.strategy1, sol.w1, 1));
  CHECK(sol.strategy1.at(0) == 2);
}

TEST_CASE("parity regions and strategies match strategy enumeration") {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const ParityGame g = random_parity_game(seed);
    CAPTURE(seed);
    const GameSolution sol = solve_parity(g);
    const auto oracle = pmdp::testsupport::oracle_parity(g);
    REQUIRE(sol.w1 == oracle.w1);
    REQUIRE(sol.w2 == oracle.w2);
    if (!sol.w1.empty()) REQUIRE(verify_memoryless_winning(g, sol.strategy1, sol.w1, 1));
    if (!sol.w2.empty()) REQUIRE(verify_memoryless_winning(g, sol.strategy2, sol.w2, 2));
  }
}

TEST_CASE("recurrence objectives can demand memory") {
  // winning needs both loops infinitely often: the accepting state for the
  // recurrence, the rank-2 state to dominate the odd rank. No positional
  // strategy does both, a two-mode strategy does.
  const ParityGame g = two_loop_game();
  ParityBuchiGame pb;
  pb.game = g;
  pb.accepting = {0, 1, 0};

  const ParityBuchiSolution sol = solve_parity_buchi(pb);
  CHECK(sol.w1 == std::vector<int>{0, 1, 2});
  CHECK(sol.strategy.memory_count > 1);
  CHECK(verify_finite_memory_winning(g, sol.strategy, sol.w1, &pb.accepting));

  // sanity: no positional strategy wins from s
  for (int choice = 0; choice < 2; ++choice) {
    MemorylessStrategy f;
    f.action = {choice, 0, 0};
    CHECK_FALSE(verify_finite_memory_winning(
        g,
        FiniteMemoryStrategy{1, 0, {{0}, {0}, {0}}, {{choice}, {0}, {0}}},
        {0}, &pb.accepting));
    (void)f;
  }
}

TEST_CASE("parity-recurrence winning regions match enumeration") {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const ParityGame g = random_parity_game(seed);
    const std::vector<char> acc = random_accepting(seed, g.size());
    CAPTURE(seed);
    ParityBuchiGame pb{g, acc};
    const ParityBuchiSolution sol = solve_parity_buchi(pb);
    REQUIRE(sol.w1 == pmdp::testsupport::oracle_parity_buchi_w1(g, acc));
    if (!sol.w1.empty())
      REQUIRE(verify_finite_memory_winning(g, sol.strategy, sol.w1, &acc));
  }
}

TEST_CASE("branch gadget structure") {
  const ParityMDP m = load_fixture_arena("fig1.json");
  EndComponent big;
  big.states = {0, 2, 3};  // q0, m, m2; top rank 2 at m2, odd rank 1 below
  CHECK(peak_states(m, big) == std::vector<int>{3});

  const SgecGadget gg = build_sgec_gadget(m, big);
  // main nodes for q0, m, m2 plus two branches for the non-peak
  // environment state m; the peak m2 collapses to a self-loop sink
  int silent = 0, flagged = 0, stay = 0;
  for (const auto& s : gg.game.game.states) {
    for (const auto& a : s.actions) stay += a.name == "stay";
    if (s.name.find("#silent") != std::string::npos) {
      ++silent;
      CHECK(s.owner == 1);
      CHECK(s.rank == 0);
    }
    if (s.name.find("#flagged") != std::string::npos) {
      ++flagged;
      CHECK(s.owner == 2);
      CHECK(s.rank == 0);
    }
  }
  CHECK(silent == 1);
  CHECK(flagged == 1);
  CHECK(stay == 1);
  REQUIRE(gg.game.game.size() == 5);
}

TEST_CASE("super-good check on the running example") {
  const ParityMDP m = load_fixture_arena("fig1.json");

  EndComponent big;
  big.states = {0, 2, 3};
  const SuperGoodResult r = super_good_states(m, big);
  // the coin loop is good but not super-good: the environment can dodge m2
  // in the gadget while keeping the odd rank 1 on top
  CHECK_FALSE(r.is_sgec);
  CHECK(r.super_good == std::vector<int>{3});
  CHECK_FALSE(r.witness.has_value());

  EndComponent solo;
  solo.states = {1};
  const SuperGoodResult rs = super_good_states(m, solo);
  CHECK(rs.is_sgec);
  CHECK(rs.super_good == std::vector<int>{1});
  REQUIRE(rs.witness.has_value());
  CHECK(check_sgec_witness(m, solo, rs.super_good, peak_states(m, solo), *rs.witness));
}

TEST_CASE("odd top rank disqualifies immediately") {
  ParityMDP m;
  m.states.resize(1);
  m.states[0] = {0, "x", 1, 1, Rational(0), {{0, "a", 0, Rational()}}};
  m.initial = 0;
  EndComponent c;
  c.states = {0};
  const SuperGoodResult r = super_good_states(m, c);
  CHECK_FALSE(r.is_sgec);
  CHECK(r.super_good.empty());
}

TEST_CASE("super-good verdicts match the gadget-enumeration oracle") {
  for (std::uint64_t seed = 300; seed < 360; ++seed) {
    const ParityMDP m = pmdp::testsupport::random_parity_mdp(seed);
    CAPTURE(seed);
    for (const auto& c : max_end_components(m)) {
      const SuperGoodResult r = super_good_states(m, c);
      REQUIRE(r.is_sgec == pmdp::testsupport::oracle_is_sgec(m, c.states));
      if (r.is_sgec) {
        REQUIRE(r.witness.has_value());
        REQUIRE(check_sgec_witness(m, c, r.super_good, peak_states(m, c), *r.witness));
      }
    }
  }
}
