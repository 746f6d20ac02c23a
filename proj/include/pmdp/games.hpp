#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmdp/arena.hpp"
#include "pmdp/decomposition.hpp"
#include "pmdp/strategy_types.hpp"

namespace pmdp {

// Two-player parity game, max-even convention: Player 1 wins a play when
// the highest rank seen infinitely often is even. No probabilities: every
// action is a move for its owner.
struct GameAction {
  int id = 0;
  std::string name;
  int to = 0;
};

struct GameState {
  int id = 0;
  std::string name;
  int owner = 1;
  int rank = 0;
  std::vector<GameAction> actions;
};

struct ParityGame {
  std::vector<GameState> states;
  int initial = 0;

  int size() const { return static_cast<int>(states.size()); }
  int max_rank() const;
};

// The arena's game reading: costs and probabilities dropped, every action a
// move.
ParityGame project_game(const ParityMDP& m);

// Zielonka's algorithm with positional strategy extraction. The returned
// strategies are verified on their winning regions before returning;
// verification failure is an internal error.
struct GameSolution {
  std::vector<int> w1, w2;  // sorted winning regions
  MemorylessStrategy strategy1, strategy2;
};
GameSolution solve_parity(const ParityGame& g);

// Certifies that positional strategy `f` of `player` wins from every state
// of `domain`: the domain must be closed under the opponent's moves and
// f's moves, and the f-restricted subgraph inside the domain must not
// contain a cycle whose top rank has the opponent's parity.
bool verify_memoryless_winning(const ParityGame& g, const MemorylessStrategy& f,
                               const std::vector<int>& domain, int player);

// Parity-Buechi game: Player 1 additionally needs some accepting state to
// recur infinitely often.
struct ParityBuchiGame {
  ParityGame game;
  std::vector<char> accepting;
};

// Solves the parity-Buechi game exactly. The conjunction is turned into
// Streett pairs (one per odd rank present, plus the recurrence pair) and the
// pairs are tracked with an index appearance record; the resulting parity
// game over (state, record) pairs is solved with Zielonka. Player 1 needs
// finite memory; the returned strategy's memory elements are (record,
// current state) pairs. The winner of (s, record) is independent of the
// record; that independence is asserted.
struct ParityBuchiSolution {
  std::vector<int> w1;  // sorted
  FiniteMemoryStrategy strategy;  // defined on w1
};
ParityBuchiSolution solve_parity_buchi(const ParityBuchiGame& g);

// Product-based certificate for a finite-memory strategy in a parity or
// parity-Buechi game: explores (state, memory) pairs from the given start
// states against all opponent moves, and checks that no reachable cycle has
// an odd top rank, and (when `accepting` is nonnull) that every reachable
// cycle contains an accepting state.
bool verify_finite_memory_winning(const ParityGame& g, const FiniteMemoryStrategy& f,
                                  const std::vector<int>& starts,
                                  const std::vector<char>* accepting);

// Soundness gadget for an end component C of the arena. Built over the game
// reading restricted to C. States of C with even rank above every odd rank
// of C ("peak states") become accepting self-loop sinks that keep their
// rank. Every other environment state s is split: s keeps its rank and only
// chooses between two rank-0 branch nodes carrying s's moves, a Player-1
// owned silent branch and an accepting environment-owned branch.
// (A Player-1 win from everywhere certifies that C supports finite-memory
// strategies that reach the peak states with probability one while staying
// parity-winning on the plays that miss them.)
struct SgecGadget {
  ParityBuchiGame game;
  std::vector<int> orig_of;             // gadget state -> arena id (-1 for branch nodes)
  std::vector<int> node_of;             // arena id -> gadget main node or -1
  std::vector<int> silent_branch_of;    // arena id -> P1-owned branch node or -1
  std::vector<int> flagged_branch_of;   // arena id -> accepting branch node or -1
  std::vector<char> is_peak;            // arena id -> became accepting sink
  std::vector<int> peak_states;         // sorted arena ids
  // Gadget action id -> original action id, per gadget state.
  std::vector<std::vector<int>> action_map;
};
SgecGadget build_sgec_gadget(const ParityMDP& m, const EndComponent& c);

// Decides how much of the end component C supports such witnesses.
// Returns (whole component qualifies, qualifying subset W, witness).
// The witness is a finite-memory strategy over the ORIGINAL arena states,
// folded from the gadget solution; it is returned when the whole component
// qualifies and is validated internally (reaches the peak states with
// probability one from every state, and any play avoiding them satisfies
// parity). If the component's top rank is odd, the answer is immediately
// negative with empty W.
struct SuperGoodResult {
  bool is_sgec = false;
  std::vector<int> super_good;  // sorted arena ids
  std::optional<FiniteMemoryStrategy> witness;
};
SuperGoodResult super_good_states(const ParityMDP& m, const EndComponent& c);

// States of `c` with even rank exceeding every odd rank of `c`.
std::vector<int> peak_states(const ParityMDP& m, const EndComponent& c);

// Validation used for witnesses (exposed for tests): the strategy, run on
// the arena restricted to C from every state of W, reaches `peaks` with
// probability one, and every play that avoids `peaks` has even top rank.
bool check_sgec_witness(const ParityMDP& m, const EndComponent& c, const std::vector<int>& w,
                        const std::vector<int>& peaks, const FiniteMemoryStrategy& h);

}  // namespace pmdp
