#pragma once

#include <vector>

#include "pmdp/arena.hpp"
#include "pmdp/games.hpp"
#include "pmdp/rational.hpp"

namespace pmdp::testsupport {

// Brute-force re-derivations of every solver result, straight from the
// definitions: subset enumeration for components, positional strategy
// enumeration for games (exact for both players by memoryless determinacy
// of parity conditions, and for the environment side of the parity-Buechi
// games because its objective is a Rabin condition), policy enumeration
// plus stationary/absorption analysis for chains. Deliberately shares no
// algorithmic code with the library.

bool oracle_is_ec(const ParityMDP& m, const std::vector<int>& states);
std::vector<std::vector<int>> oracle_max_ecs(const ParityMDP& m, const std::vector<int>& domain);
std::vector<std::vector<int>> oracle_max_gecs(const ParityMDP& m,
                                              const std::vector<int>& domain);

struct OracleGameResult {
  std::vector<int> w1, w2;  // sorted; a determinacy violation throws
};
OracleGameResult oracle_parity(const ParityGame& g);

// Winning region of the protagonist for "max-even parity AND accepting
// visited infinitely often".
std::vector<int> oracle_parity_buchi_w1(const ParityGame& g, const std::vector<char>& accepting);

// Super-good component test: builds its own copy of the branch gadget and
// solves it by environment-strategy enumeration.
bool oracle_is_sgec(const ParityMDP& m, const std::vector<int>& c);
std::vector<std::vector<int>> oracle_max_sgecs(const ParityMDP& m,
                                               const std::vector<int>& domain);

// Exact long-run average cost of a finite chain, per state (stationary
// distributions of the bottom classes plus absorption probabilities).
struct OracleChain {
  std::vector<std::vector<std::pair<int, Rational>>> rows;
  std::vector<Rational> cost;
};
std::vector<Rational> oracle_chain_gain(const OracleChain& c);

// Optimal (minimal) gain vector of the arena's stochastic view, pointwise
// over exhaustive system policies.
std::vector<Rational> oracle_min_gain(const ParityMDP& m);

// Minimal mean cost achievable while staying inside end component `c`.
Rational oracle_ec_value(const ParityMDP& m, const std::vector<int>& c);

// Full-domain conveniences.
inline std::vector<int> oracle_all_states(const ParityMDP& m) {
  std::vector<int> all(m.states.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}
inline std::vector<std::vector<int>> oracle_max_ecs(const ParityMDP& m) {
  return oracle_max_ecs(m, oracle_all_states(m));
}
inline std::vector<std::vector<int>> oracle_max_gecs(const ParityMDP& m) {
  return oracle_max_gecs(m, oracle_all_states(m));
}
inline std::vector<std::vector<int>> oracle_max_sgecs(const ParityMDP& m) {
  return oracle_max_sgecs(m, oracle_all_states(m));
}

struct OracleSureCost {
  bool realizable = false;
  Rational value;
  std::vector<int> winning;                 // sorted
  std::vector<std::vector<int>> components; // retained, sorted lexicographically
};
OracleSureCost oracle_cost_sure(const ParityMDP& m, bool finite_memory);

}  // namespace pmdp::testsupport
