#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pmdp/arena.hpp"
#include "pmdp/games.hpp"
#include "pmdp/strategy_types.hpp"
#include "pmdp/surecost.hpp"

namespace pmdp {

// Input/output signal names. Letters are valuations packed into int bits in
// list order: a standard letter over I and O uses bits [0,|I|) for inputs
// and [|I|, |I|+|O|) for outputs. An extended letter additionally carries
// the sensed set: inputs in [0,|I|), sensed set in [|I|, 2|I|), outputs in
// [2|I|, 2|I|+|O|).
struct SignalAlphabet {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  int in_bits() const { return static_cast<int>(inputs.size()); }
  int out_bits() const { return static_cast<int>(outputs.size()); }
  int standard_bits() const { return in_bits() + out_bits(); }
  int extended_bits() const { return 2 * in_bits() + out_bits(); }
};

// Deterministic parity word automaton, total over its letter space (the
// standard one, or the extended one when `extended` is set). Max-even
// acceptance: a word is accepted when the top rank visited infinitely
// often on its run is even.
struct Dpw {
  SignalAlphabet alphabet;
  bool extended = false;
  int initial = 0;
  std::vector<int> rank;                 // per state
  std::vector<std::vector<int>> delta;   // [state][letter] -> state

  int size() const { return static_cast<int>(rank.size()); }
  int letter_count() const { return delta.empty() ? 0 : static_cast<int>(delta[0].size()); }
};

// Deterministic finite-word monitor over the standard letter space; used
// for penalties, read as "currently accepting" after each prefix.
struct Dfw {
  SignalAlphabet alphabet;
  int initial = 0;
  std::vector<char> accepting;
  std::vector<std::vector<int>> delta;

  int size() const { return static_cast<int>(accepting.size()); }
};

// Universal parity word automaton (every run must accept); transition SETS
// are nonempty and sorted.
struct Upw {
  SignalAlphabet alphabet;
  bool extended = false;
  int initial = 0;
  std::vector<int> rank;
  std::vector<std::vector<std::vector<int>>> delta;  // [state][letter] -> sorted set

  int size() const { return static_cast<int>(rank.size()); }
};

// Input-driven output machine. `step` consumes input valuations (packed
// over `inputs`), `label` holds the output valuation emitted on entering a
// state; the initial state's label is empty by convention and never
// consumed. `declared_sensing` is the sensed set the originating strategy
// announced per state; `sensed` is the structural sensing derived from
// `step` (signals whose flip can change the successor), always a subset of
// the declared one for strategies extracted from sensing games.
struct Transducer {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  int initial = 0;
  std::vector<std::vector<int>> step;  // [state][input letter] -> state
  std::vector<int> label;              // [state] -> output letter
  std::vector<int> declared_sensing;   // [state] -> input bit mask
  std::vector<int> sensed;             // [state] -> input bit mask (derived)

  int size() const { return static_cast<int>(label.size()); }
};

// Stochastic input model. Only the uniform distribution ships; the type is
// the extension point.
struct InputDistribution {
  std::string kind = "uniform";
};

// Penalty specification: monitors over the same alphabet as the main
// automaton, each charging gamma[j] whenever it is currently accepting.
struct PenaltySpec {
  std::vector<Dfw> monitors;
  std::vector<long> gamma;
};

// Guard for the exponential letter enumerations. Operations throw
// DomainError("TooManySignals") when a construction would enumerate more
// than 2^20 letters; the CLI applies a tighter configurable limit.
void require_enumerable(const SignalAlphabet& a, bool extended);

// The synthesis game of a standard DPW: environment states are automaton
// states choosing an input valuation, system states are (state, input)
// pairs choosing an output valuation; ranks are copied to both layers.
struct SynthesisGame {
  ParityGame game;
  SignalAlphabet alphabet;
  int dpw_states = 0;
  int in_bits = 0;
  int out_bits = 0;

  int q_id(int q) const { return q; }
  int choice_id(int q, int i) const { return dpw_states + q * (1 << in_bits) + i; }
};
SynthesisGame dpw_to_game(const Dpw& a);

// The penalties arena: product of the DPW with every monitor; environment
// tuple states pick inputs uniformly, their system copies pick outputs.
// Both copies of a product tuple carry the tuple's penalty as cost and the
// DPW state's rank. State count is |Q|*prod|Q_j|*(1+2^|I|) exactly.
ParityMDP penalties_mdp(const Dpw& a, const PenaltySpec& spec,
                        const InputDistribution& dist = {});

// The sensing view of a standard DPW: same states over the extended
// alphabet, a letter (i, x, o) moving universally to the delta-images of
// all inputs that agree with i on the sensed set x.
Upw sensing_upw(const Dpw& a);

// Subset construction for universal safety automata (ranks {0,1} with
// absorbing rank-1 states); any subset touching a rejecting state collapses
// to a single rejecting sink. Throws DomainError("NotSafety") otherwise.
Dpw determinize_safety(const Upw& u);

// The sensing arena of an extended-alphabet DPW: a zero-cost START state
// where the system picks the first sensed set, environment states (s, x)
// sampling input classes uniformly at cost |x|, and system states
// (s, x, i) picking the next sensed set and the output, also at cost |x|.
// State count is 1 + |S|*2^|I|*(1+2^|I|) exactly.
struct SensingGame {
  ParityMDP arena;
  SignalAlphabet alphabet;
  int dpw_states = 0;
  int in_bits = 0;
  int out_bits = 0;

  int start_id() const { return 0; }
  int p2_id(int s, int x) const { return 1 + s * (1 << in_bits) + x; }
  int p1_id(int s, int x, int i) const {
    const int ni = 1 << in_bits;
    return 1 + dpw_states * ni + (s * ni + x) * ni + i;
  }
  bool is_p2(int id) const { return id >= 1 && id < 1 + dpw_states * (1 << in_bits); }
  // Decodes a (s, x) environment state or a (s, x, i) system state.
  void decode_p2(int id, int& s, int& x) const {
    const int t = id - 1;
    s = t / (1 << in_bits);
    x = t % (1 << in_bits);
  }
  void decode_p1(int id, int& s, int& x, int& i) const {
    const int ni = 1 << in_bits;
    const int t = id - 1 - dpw_states * ni;
    i = t % ni;
    s = (t / ni) / ni;
    x = (t / ni) % ni;
  }
};
SensingGame sensing_game(const Dpw& d, const InputDistribution& dist = {});

// Full sensing pipeline bundle. When built from a standard DPW the
// universal view and its determinization are included; when built from a
// pre-determinized extended DPW, `determinized` is that input and `upw` is
// empty.
struct SensingPipeline {
  Upw upw;
  Dpw determinized;
  SensingGame game;
  SureCostResult result;
};

// sensing cost of the language of `a`: builds the sensing view,
// determinizes the safety fragment, solves the sensing arena with the
// requested memory mode. Throws NotSafety when the view leaves the safety
// fragment; result.realizable is false when the specification is
// unrealizable.
SensingPipeline sensing_cost(const Dpw& a, bool finite_memory);

// The same pipeline starting from a caller-supplied determinized
// extended-alphabet DPW.
SensingPipeline sensing_cost_determinized(const Dpw& d, bool finite_memory);

// Folds a certified winning finite-memory strategy of a sensing game into
// a transducer: states are (environment game state, memory, emitted
// output) triples reachable under the strategy; the strategy is consulted
// only at the class representative (s, x, i&x), which keeps the structural
// sensing inside the declared set. Throws DomainError("NotWinning") when
// the strategy fails its certificate.
Transducer extract_transducer(const SensingGame& sg, const FiniteMemoryStrategy& f);

// The synthesis-game analogue; every input is declared sensed.
Transducer extract_transducer(const SynthesisGame& g, const FiniteMemoryStrategy& f);

// Exact expected long-run average number of sensed signals of a transducer
// under uniform inputs: the chain over transducer states with cost
// |sensed(q)|, gain taken at the initial state.
Rational transducer_expected_sensing_cost(const Transducer& t);

// JSON encoding (letters: arrays of true signal names for the standard
// alphabet; {"in": [...], "sense": [...], "out": [...]} objects for the
// extended one).
Dpw parse_dpw(const nlohmann::json& j);
Dfw parse_dfw(const nlohmann::json& j);
Upw parse_upw(const nlohmann::json& j);
// Bundle {"spec": <dpw>, "monitors": [<dfw>...], "gamma": [ints]}.
PenaltySpec parse_penalty_bundle(const nlohmann::json& j, Dpw& spec_out);
nlohmann::json dpw_to_json(const Dpw& a);
nlohmann::json upw_to_json(const Upw& u);
nlohmann::json transducer_to_json(const Transducer& t);
std::string transducer_to_dot(const Transducer& t);

}  // namespace pmdp
