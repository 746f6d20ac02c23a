#pragma once

#include <vector>

#include "pmdp/arena.hpp"
#include "pmdp/decomposition.hpp"
#include "pmdp/linalg.hpp"
#include "pmdp/strategy_types.hpp"

namespace pmdp {

// Finite Markov chain with exact transition probabilities. Rows carry only
// positive entries and sum to one.
struct Chain {
  std::vector<std::vector<std::pair<int, Rational>>> rows;
  Vec cost;

  int size() const { return static_cast<int>(rows.size()); }
};

// Long-run average cost (gain) and bias of every state, computed exactly:
// recurrent classes get their stationary average; the bias is normalized to
// zero at the smallest-id state of each recurrent class; transient states
// are resolved through absorption.
struct ChainValues {
  Vec gain;
  Vec bias;
};

ChainValues chain_values(const Chain& c);
Vec chain_gain(const Chain& c);

// The chain a memoryless strategy induces on the arena's MDP reading,
// restricted to `domain` (nullptr = all). Chain state i corresponds to
// index_map[i] in the arena. Throws InvalidRestriction when the domain is
// not closed (positive environment edge leaving, or a system state whose
// chosen action leaves), or the strategy misses a system state.
struct InducedChain {
  Chain chain;
  std::vector<int> index_map;     // chain index -> arena id
  std::vector<int> arena_to_idx;  // arena id -> chain index or -1
};
InducedChain induced_chain(const ParityMDP& m, const MemorylessStrategy& f,
                           const std::vector<int>* domain = nullptr,
                           const Vec* cost_override = nullptr);

// Exact minimal long-run average cost from every state of the domain,
// ranks ignored. Multichain Howard policy iteration: policies are evaluated
// exactly (gain and bias), the gain is improved first and the bias among
// gain-conserving actions second, switching only on strict improvement with
// smallest-action-id tie-breaking. On termination the optimality equations
// are asserted; their failure is an internal error.
//
// gain/bias are indexed by arena id (zero outside the domain); the strategy
// carries the optimal choice at each system state of the domain.
struct MeanPayoffSolution {
  Vec gain;
  Vec bias;
  MemorylessStrategy strategy;
};
MeanPayoffSolution min_mean_payoff(const ParityMDP& m, const std::vector<int>* domain = nullptr,
                                   const Vec* cost_override = nullptr);

// Minimal long-run average cost inside an end component, together with an
// optimal positional policy. The optimum is the same from every state of
// the component (plays can steer anywhere inside an end component with
// probability one); unequal optima are an internal error ("NotConstant").
// Throws DomainError("NotEC") when c is not an end component.
struct EcSolution {
  Rational value;
  MemorylessStrategy strategy;
};
EcSolution ec_solve(const ParityMDP& m, const EndComponent& c);
Rational ec_value(const ParityMDP& m, const EndComponent& c);

// Maximal probability of reaching `target` while staying inside the end
// component `component`, from every state of the component, with a
// positional strategy attaining the values. Policy iteration with truthful
// evaluation: recurrent classes of the evaluated policy that avoid the
// target get value zero. The set of value-one states is checked against the
// independent almost-sure-reachability fixpoint; disagreement is an
// internal error.
struct ReachSolution {
  Vec value;  // indexed by arena id, zero outside the component
  MemorylessStrategy strategy;
};
ReachSolution max_reach(const ParityMDP& m, const EndComponent& component,
                        const std::vector<int>& target);

// States of `domain` from which Player 1 can reach `target` with
// probability one (two-level fixpoint over the MDP reading).
std::vector<int> almost_sure_reach(const ParityMDP& m, const std::vector<int>& domain,
                                   const std::vector<int>& target);

}  // namespace pmdp
