#pragma once

#include <vector>

#include "pmdp/arena.hpp"
#include "pmdp/decomposition.hpp"
#include "pmdp/mdp.hpp"
#include "pmdp/rational.hpp"
#include "pmdp/strategy_types.hpp"

namespace pmdp {

// Restriction of the arena to Player 1's sure parity winning region of the
// game reading. The winning region is closed under environment moves, so
// only system actions can leave it and those get dropped by the
// restriction.
struct PrunedArena {
  bool realizable = false;             // initial state survived
  std::vector<int> winning;            // sorted original ids kept
  std::vector<int> pruned;             // sorted original ids removed
  MemorylessStrategy parity_strategy;  // positional winning strategy on `winning`
  ParityMDP arena;                     // materialized restriction (empty if nothing won)
};
PrunedArena prune_to_sure_winning(const ParityMDP& m);

struct ValuedComponent {
  EndComponent component;  // original ids
  Rational value;          // optimal expected mean cost inside the component
};

// Result of either sure-cost pipeline. `value` is meaningful only when
// `realizable`; the reduced arena (ranks erased, per-state costs replaced
// by component values inside retained components and W+1 outside, W = the
// ORIGINAL maximal cost) is materialized for reporting, while the numeric
// solution `mprime` is indexed by original arena ids.
struct SureCostResult {
  bool realizable = false;
  Rational value;
  std::vector<int> winning;
  std::vector<int> pruned;
  MemorylessStrategy parity_strategy;
  std::vector<ValuedComponent> components;
  Vec reduced_cost;               // per original id; W+1 default
  ParityMDP reduced;              // the reduced arena over the winning region
  std::vector<int> reduced_source;  // reduced id -> original id
  MeanPayoffSolution mprime;      // solution of the reduced MDP, original ids
};

// Minimal expected mean cost over all sure-parity-winning strategies
// (infinite memory allowed): prune, decompose into maximal good end
// components, replace costs by component values (W+1 outside), solve the
// resulting mean-payoff MDP. `realizable` is false iff the initial state is
// not sure-winning.
SureCostResult cost_sure_infinite(const ParityMDP& m);

// The same infimum restricted to finite-memory strategies: retained
// components are the maximal super-good end components instead.
SureCostResult cost_sure_finite(const ParityMDP& m);

// Maximal super-good end components within `domain` (nullptr = everything;
// callers normally pass the sure-winning region). For each odd bound k the
// search alternates end-component decomposition, deletion of environment
// attractors of states with odd rank above k, and the super-good test,
// deleting the attractor of the non-qualifying part on failure. Results
// are deduplicated; contained components are dropped and overlapping ones
// merged (the union of overlapping super-good components is super-good).
std::vector<EndComponent> max_sgecs(const ParityMDP& m, const std::vector<int>* domain = nullptr);

}  // namespace pmdp
