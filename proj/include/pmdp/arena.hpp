#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmdp/rational.hpp"

namespace pmdp {

// A two-player arena with parity ranks and state costs. Player 1 (the
// system) owns deterministic states: each action is a single edge. Player 2
// (the environment) owns stochastic states: each action is a single edge
// carrying the probability with which the environment takes it, and the
// probabilities of a state's actions sum to one.
//
// The same object is read in two ways: as a parity game (ignore costs and
// probabilities; every action is a move) and as a cost MDP (ignore ranks;
// only positive-probability environment edges can occur). Ranks use the
// max-even convention: a play is winning for Player 1 when the highest rank
// visited infinitely often is even.

struct Action {
  int id = 0;          // dense per state, in input order
  std::string name;    // action label, unique per state
  int to = 0;          // successor state id
  Rational prob;       // environment states: probability of this edge
};

struct State {
  int id = 0;
  std::string name;
  int owner = 1;  // 1 = system, 2 = environment
  int rank = 0;
  Rational cost;
  std::vector<Action> actions;
};

struct ParityMDP {
  std::vector<State> states;
  int initial = 0;
  // Populated by restrict(): original id of each state in the parent arena.
  std::vector<int> source_ids;

  int size() const { return static_cast<int>(states.size()); }
  int max_rank() const;
  Rational max_cost() const;
  // Returns the id of the named state, or nullopt.
  std::optional<int> state_by_name(const std::string& name) const;
};

struct Diagnostic {
  int state = -1;  // -1 for arena-level problems
  std::string message;
};

// Structural checks: ids dense and in order, owners in {1,2}, ranks and
// costs nonnegative, every state has an action, system actions carry no
// probability, environment action probabilities are nonnegative and sum to
// one per state, all targets exist, action names unique per state.
// Diagnostics come back sorted by state id.
std::vector<Diagnostic> validate(const ParityMDP& m);

// Throws DomainError("InvalidArena", ...) listing all diagnostics.
void require_valid(const ParityMDP& m);

// View of a parent arena restricted to a subset, original ids preserved.
struct SubArena {
  const ParityMDP* parent = nullptr;
  std::vector<int> states;  // sorted original ids
  int entry = -1;           // original id, -1 if none designated
};

// Materializes the sub-arena induced by `keep`: system actions leaving the
// set are dropped, and the result must be well formed (every kept system
// state retains an action; kept environment states keep probability mass
// exactly one inside the set). Otherwise throws
// DomainError("InvalidRestriction", ...). States are reindexed densely in
// ascending id order; names are kept and source_ids records original ids.
// `entry` (original id, must be kept) becomes the initial state; -1 keeps
// the parent initial if it survives, else state 0.
ParityMDP restrict_arena(const ParityMDP& m, const std::vector<int>& keep, int entry = -1);

// States from which the environment can force reaching `target` in the MDP
// reading: an environment state joins when some positive-probability action
// enters the set, a system state joins when it has at least one action
// inside `domain` and all of them enter the set. Runs within `domain`
// (nullptr = all states); system actions leaving the domain are ignored.
// Returns a sorted superset of target-within-domain. Linear-time counting
// fixpoint.
std::vector<int> env_attractor(const ParityMDP& m, const std::vector<int>& target,
                               const std::vector<int>* domain = nullptr);

// Dual: a system state joins when some in-domain action enters the set, an
// environment state joins when it has at least one positive-probability
// in-domain action and all of them enter the set.
std::vector<int> sys_attractor(const ParityMDP& m, const std::vector<int>& target,
                               const std::vector<int>* domain = nullptr);

// The MDP reading as a standalone arena: same states and actions with all
// ranks erased to zero.
ParityMDP project_mdp(const ParityMDP& m);

}  // namespace pmdp
