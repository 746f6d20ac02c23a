#include <algorithm>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "pmdp/arena.hpp"
#include "pmdp/decomposition.hpp"
#include "pmdp/errors.hpp"
#include "pmdp/mdp.hpp"

using namespace pmdp;
using pmdp::testsupport::load_fixture_arena;
using pmdp::testsupport::random_mdp;
using pmdp::testsupport::random_parity_mdp;

TEST_CASE("chain values on a deterministic cycle") {
  // 0 -> 1 -> 0 with costs 1, 3: gain 2 everywhere, bias pinned at state 0
  Chain c;
  c.rows = {{{1, Rational(1)}}, {{0, Rational(1)}}};
  c.cost = {Rational(1), Rational(3)};
  const ChainValues v = chain_values(c);
  CHECK(v.gain == Vec{Rational(2), Rational(2)});
  CHECK(v.bias[0] == Rational(0));
  CHECK(v.bias[1] == Rational(1));
}

TEST_CASE("chain values with transient states and two bottom classes") {
  // 0 flips a coin between absorbing 1 (cost 4) and absorbing 2 (cost 8)
  Chain c;
  c.rows = {{{1, Rational(1, 2)}, {2, Rational(1, 2)}},
            {{1, Rational(1)}},
            {{2, Rational(1)}}};
  c.cost = {Rational(0), Rational(4), Rational(8)};
  const Vec g = chain_gain(c);
  CHECK(g[0] == Rational(6));
  CHECK(g[1] == Rational(4));
  CHECK(g[2] == Rational(8));
}

TEST_CASE("gain equations have a consistent bias") {
  // lazy coin: stay with 1/3, hop with 2/3; verify gain + bias satisfy
  // g + b(s) = cost(s) + sum p b(t) on every state
  Chain c;
  c.rows = {{{0, Rational(1, 3)}, {1, Rational(2, 3)}},
            {{0, Rational(3, 4)}, {1, Rational(1, 4)}}};
  c.cost = {Rational(2), Rational(7)};
  const ChainValues v = chain_values(c);
  for (int s = 0; s < 2; ++s) {
    Rational rhs = c.cost[s] - v.gain[s];
    for (const auto& [t, p] : c.rows[s]) rhs += p * v.bias[t];
    CHECK(v.bias[s] == rhs);
  }
  // both states are in one recurrent class: equal gains
  CHECK(v.gain[0] == v.gain[1]);
}

TEST_CASE("chain gains match the stationary-distribution oracle") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 40; ++round) {
    const int n = 2 + static_cast<int>(rng() % 5);
    Chain c;
    pmdp::testsupport::OracleChain oc;
    c.rows.resize(n);
    oc.rows.resize(n);
    for (int s = 0; s < n; ++s) {
      const Rational cost(static_cast<long>(rng() % 11));
      c.cost.push_back(cost);
      oc.cost.push_back(cost);
      // one or two successors with denominator at most 3
      const int t1 = static_cast<int>(rng() % n);
      if (rng() % 2 == 0) {
        c.rows[s] = {{t1, Rational(1)}};
      } else {
        int t2 = static_cast<int>(rng() % n);
        if (t2 == t1) t2 = (t1 + 1) % n;
        c.rows[s] = {{t1, Rational(1, 3)}, {t2, Rational(2, 3)}};
      }
      oc.rows[s] = c.rows[s];
    }
    CAPTURE(round);
    REQUIRE(chain_gain(c) == pmdp::testsupport::oracle_chain_gain(oc));
  }
}

TEST_CASE("induced chain of the always-risky policy on the running example") {
  const ParityMDP m = load_fixture_arena("fig1.json");
  MemorylessStrategy f;
  f.action = {1, 0, -1, -1};  // q0 -> b (into the coin), q1 -> a
  const InducedChain ic = induced_chain(m, f);
  // stationary split 2/5 q0, 2/5 m, 1/5 m2: mean cost 32/5 on that class
  const Vec g = chain_gain(ic.chain);
  const auto at = [&](int arena_id) {
    for (std::size_t i = 0; i < ic.index_map.size(); ++i)
      if (ic.index_map[i] == arena_id) return g[i];
    FAIL("state missing from induced chain");
    return Rational();
  };
  CHECK(at(0) == Rational(32, 5));
  CHECK(at(2) == Rational(32, 5));
  CHECK(at(3) == Rational(32, 5));
  CHECK(at(1) == Rational(10));
}

TEST_CASE("optimal mean payoff on the running example") {
  const ParityMDP m = load_fixture_arena("fig1.json");
  const MeanPayoffSolution sol = min_mean_payoff(m);
  CHECK(sol.gain == Vec{Rational(1), Rational(10), Rational(1), Rational(1)});
  // q0 sits on its own cheap loop
  CHECK(sol.strategy.at(0) == 0);
  // gain/bias optimality equations at the chosen actions
  for (const auto& s : m.states) {
    if (s.owner != 1) continue;
    const Action& a = s.actions[sol.strategy.at(s.id)];
    CHECK(sol.gain[s.id] == sol.gain[a.to]);
    CHECK(sol.bias[s.id] == s.cost - sol.gain[s.id] + sol.bias[a.to]);
  }
}

TEST_CASE("optimal gains match policy enumeration") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const ParityMDP m = random_mdp(seed);
    CAPTURE(seed);
    const MeanPayoffSolution sol = min_mean_payoff(m);
    REQUIRE(sol.gain == pmdp::testsupport::oracle_min_gain(m));

    // no single-state deviation may improve the gain
    for (const auto& s : m.states) {
      if (s.owner != 1) continue;
      for (const auto& a : s.actions) REQUIRE(sol.gain[s.id] <= sol.gain[a.to]);
    }
  }
}

TEST_CASE("component values on the running example") {
  const ParityMDP m = load_fixture_arena("fig1.json");
  EndComponent big;
  big.states = {0, 2, 3};
  EndComponent small;
  small.states = {1};
  // inside {q0, m, m2} the controller just parks on q0's self-loop
  CHECK(ec_value(m, big) == Rational(1));
  CHECK(ec_value(m, small) == Rational(10));

  const EcSolution sol = ec_solve(m, big);
  CHECK(sol.value == Rational(1));
  // the witness policy must stay inside the component
  CHECK(sol.strategy.at(0) == 0);

  EndComponent bogus;
  bogus.states = {0, 2};
  CHECK_THROWS_AS(ec_value(m, bogus), DomainError);
}

TEST_CASE("component values match policy enumeration") {
  for (std::uint64_t seed = 200; seed < 240; ++seed) {
    const ParityMDP m = random_parity_mdp(seed);
    CAPTURE(seed);
    for (const auto& c : max_end_components(m)) {
      EndComponent ec;
      ec.states = c.states;
      REQUIRE(ec_value(m, ec) ==
              pmdp::testsupport::oracle_ec_value(m, c.states));
    }
  }
}

TEST_CASE("almost-sure reachability on the running example") {
  const ParityMDP m = load_fixture_arena("fig1.json");
  const std::vector<int> all = {0, 1, 2, 3};
  // q1 is reached surely from q0 by playing c; m and m2 drift back to q0
  CHECK(almost_sure_reach(m, all, {1}) == all);
  // m2 is hit from inside the coin loop with probability one only if the
  // controller keeps feeding m; q1's self-loop never gets there
  CHECK(almost_sure_reach(m, all, {3}) == std::vector<int>{0, 2, 3});

  EndComponent big;
  big.states = {0, 2, 3};
  const ReachSolution r = max_reach(m, big, {3});
  CHECK(r.value[0] == Rational(1));
  CHECK(r.value[2] == Rational(1));
  CHECK(r.value[3] == Rational(1));
  CHECK(r.strategy.at(0) == 1);  // q0 -> b feeds the coin
}
