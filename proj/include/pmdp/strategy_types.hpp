#pragma once

#include <vector>

namespace pmdp {

// Deterministic positional strategy: one action id per state, -1 where the
// strategy is undefined (states of the other player, states outside the
// strategy's domain).
struct MemorylessStrategy {
  std::vector<int> action;

  int at(int state) const {
    if (state < 0 || state >= static_cast<int>(action.size())) return -1;
    return action[state];
  }
};

// Deterministic finite-memory strategy (Mealy style over entered states).
//
// Semantics: memory starts at initial_memory. Upon ENTERING a state s,
// including the initial state at time zero, memory is updated first:
//   m <- next[s][m]
// and the action played at a Player-1 state uses the post-entry memory:
//   a = act[s][m].
// Tables are total; act entries are -1 where no action applies (Player-2
// states, unreachable combinations).
struct FiniteMemoryStrategy {
  int memory_count = 1;
  int initial_memory = 0;
  std::vector<std::vector<int>> next;  // next[state][memory] -> memory
  std::vector<std::vector<int>> act;   // act[state][memory] -> action id or -1

  int enter(int state, int memory) const { return next[state][memory]; }
  int action_at(int state, int memory) const { return act[state][memory]; }
};

}  // namespace pmdp
