#include "pmdp/synthesis.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>

#include "pmdp/errors.hpp"
#include "pmdp/json_io.hpp"
#include "pmdp/mdp.hpp"
#include "pmdp/strategy.hpp"

namespace pmdp {

using nlohmann::json;

namespace {

int popcount(int v) { return __builtin_popcount(static_cast<unsigned>(v)); }

// "-" for the empty set, otherwise names joined with '+'.
std::string mask_str(int mask, const std::vector<std::string>& names, int base = 0) {
  std::string out;
  for (std::size_t b = 0; b < names.size(); ++b) {
    if (!(mask & (1 << (base + static_cast<int>(b))))) continue;
    if (!out.empty()) out += '+';
    out += names[b];
  }
  return out.empty() ? "-" : out;
}

std::vector<std::string> mask_names(int mask, const std::vector<std::string>& names,
                                    int base = 0) {
  std::vector<std::string> out;
  for (std::size_t b = 0; b < names.size(); ++b) {
    if (mask & (1 << (base + static_cast<int>(b)))) out.push_back(names[b]);
  }
  return out;
}

void check_same_alphabet(const SignalAlphabet& a, const SignalAlphabet& b,
                         const std::string& what) {
  if (a.inputs != b.inputs || a.outputs != b.outputs) {
    throw DomainError("AlphabetMismatch", what + " must share the main alphabet");
  }
}

}  // namespace

void require_enumerable(const SignalAlphabet& a, bool extended) {
  const int bits = extended ? a.extended_bits() : a.standard_bits();
  if (bits > 20) {
    throw DomainError("TooManySignals",
                      "letter space needs " + std::to_string(bits) + " bits, limit is 20");
  }
}

SynthesisGame dpw_to_game(const Dpw& a) {
  if (a.extended) {
    throw DomainError("AlphabetMismatch", "the synthesis game needs a standard-alphabet DPW");
  }
  require_enumerable(a.alphabet, false);
  SynthesisGame out;
  out.alphabet = a.alphabet;
  out.dpw_states = a.size();
  out.in_bits = a.alphabet.in_bits();
  out.out_bits = a.alphabet.out_bits();
  const int ni = 1 << out.in_bits;
  const int no = 1 << out.out_bits;

  ParityGame& g = out.game;
  g.initial = a.initial;
  g.states.resize(static_cast<std::size_t>(a.size()) * (1 + ni));
  for (int q = 0; q < a.size(); ++q) {
    GameState& env = g.states[out.q_id(q)];
    env.id = out.q_id(q);
    env.name = "q" + std::to_string(q);
    env.owner = 2;
    env.rank = a.rank[q];
    for (int i = 0; i < ni; ++i) {
      env.actions.push_back({i, mask_str(i, a.alphabet.inputs), out.choice_id(q, i)});
      GameState& sys = g.states[out.choice_id(q, i)];
      sys.id = out.choice_id(q, i);
      sys.name = env.name + "|" + mask_str(i, a.alphabet.inputs);
      sys.owner = 1;
      sys.rank = a.rank[q];
      for (int o = 0; o < no; ++o) {
        const int target = a.delta[q][i | (o << out.in_bits)];
        sys.actions.push_back({o, mask_str(o, a.alphabet.outputs), out.q_id(target)});
      }
    }
  }
  return out;
}

ParityMDP penalties_mdp(const Dpw& a, const PenaltySpec& spec, const InputDistribution& dist) {
  if (dist.kind != "uniform") {
    throw ParseError("only the uniform input distribution is supported");
  }
  if (a.extended) {
    throw DomainError("AlphabetMismatch", "the penalties arena needs a standard-alphabet DPW");
  }
  if (spec.monitors.size() != spec.gamma.size()) {
    throw ParseError("penalty specification needs one gamma per monitor");
  }
  for (const Dfw& u : spec.monitors) check_same_alphabet(a.alphabet, u.alphabet, "monitors");
  require_enumerable(a.alphabet, false);

  const int nm = static_cast<int>(spec.monitors.size());
  long long tuples = a.size();
  for (const Dfw& u : spec.monitors) tuples *= u.size();
  const int ni = 1 << a.alphabet.in_bits();
  const int no = 1 << a.alphabet.out_bits();
  if (tuples * (1 + ni) > 2'000'000) {
    throw DomainError("TooManySignals", "penalties product too large");
  }
  const int nt = static_cast<int>(tuples);

  // Tuple index: DPW state first, then monitor states in mixed radix.
  auto decode = [&](int t, int& q, std::vector<int>& ms) {
    ms.assign(nm, 0);
    for (int j = nm - 1; j >= 0; --j) {
      ms[j] = t % spec.monitors[j].size();
      t /= spec.monitors[j].size();
    }
    q = t;
  };
  auto encode = [&](int q, const std::vector<int>& ms) {
    int t = q;
    for (int j = 0; j < nm; ++j) t = t * spec.monitors[j].size() + ms[j];
    return t;
  };

  ParityMDP m;
  m.states.resize(static_cast<std::size_t>(nt) * (1 + ni));
  auto sys_id = [&](int t, int i) { return nt + t * ni + i; };
  std::vector<int> ms, ms2;
  const Rational pin(1, ni);
  for (int t = 0; t < nt; ++t) {
    int q;
    decode(t, q, ms);
    Rational penalty;
    std::string suffix;
    for (int j = 0; j < nm; ++j) {
      if (spec.monitors[j].accepting[ms[j]]) penalty += Rational(spec.gamma[j]);
      suffix += "." + std::to_string(ms[j]);
    }
    State& env = m.states[t];
    env.id = t;
    env.name = "q" + std::to_string(q) + suffix;
    env.owner = 2;
    env.rank = a.rank[q];
    env.cost = penalty;
    for (int i = 0; i < ni; ++i) {
      env.actions.push_back({i, mask_str(i, a.alphabet.inputs), sys_id(t, i), pin});
      State& sys = m.states[sys_id(t, i)];
      sys.id = sys_id(t, i);
      sys.name = env.name + "|" + mask_str(i, a.alphabet.inputs);
      sys.owner = 1;
      sys.rank = a.rank[q];
      sys.cost = penalty;
      for (int o = 0; o < no; ++o) {
        const int letter = i | (o << a.alphabet.in_bits());
        ms2 = ms;
        for (int j = 0; j < nm; ++j) ms2[j] = spec.monitors[j].delta[ms[j]][letter];
        const int target = encode(a.delta[q][letter], ms2);
        sys.actions.push_back({o, mask_str(o, a.alphabet.outputs), target, Rational()});
      }
    }
  }
  std::vector<int> inits(nm);
  for (int j = 0; j < nm; ++j) inits[j] = spec.monitors[j].initial;
  m.initial = encode(a.initial, inits);
  return m;
}

Upw sensing_upw(const Dpw& a) {
  if (a.extended) {
    throw DomainError("AlphabetMismatch", "the sensing view starts from a standard DPW");
  }
  require_enumerable(a.alphabet, true);
  const int nin = a.alphabet.in_bits();
  const int ni = 1 << nin;
  const int no = 1 << a.alphabet.out_bits();

  Upw u;
  u.alphabet = a.alphabet;
  u.extended = true;
  u.initial = a.initial;
  u.rank = a.rank;
  u.delta.assign(a.size(), {});
  const int letters = ni * ni * no;
  for (int q = 0; q < a.size(); ++q) {
    u.delta[q].resize(letters);
    for (int e = 0; e < letters; ++e) {
      const int i = e & (ni - 1);
      const int x = (e >> nin) & (ni - 1);
      const int o = e >> (2 * nin);
      std::vector<int> targets;
      for (int j = 0; j < ni; ++j) {
        if ((j & x) != (i & x)) continue;
        targets.push_back(a.delta[q][j | (o << nin)]);
      }
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      u.delta[q][e] = std::move(targets);
    }
  }
  return u;
}

Dpw determinize_safety(const Upw& u) {
  for (int q = 0; q < u.size(); ++q) {
    if (u.rank[q] != 0 && u.rank[q] != 1) {
      throw DomainError("NotSafety", "state ranks must be 0 or 1");
    }
  }
  const int letters = u.size() > 0 ? static_cast<int>(u.delta[0].size()) : 0;
  for (int q = 0; q < u.size(); ++q) {
    if (u.rank[q] != 1) continue;
    for (int e = 0; e < letters; ++e) {
      for (int t : u.delta[q][e]) {
        if (u.rank[t] != 1) {
          throw DomainError("NotSafety", "rejecting states must be absorbing");
        }
      }
    }
  }

  Dpw d;
  d.alphabet = u.alphabet;
  d.extended = u.extended;

  std::map<std::vector<int>, int> idx;
  std::vector<std::vector<int>> subsets;
  int sink = -1;
  auto intern = [&](std::vector<int> set) {
    auto it = idx.find(set);
    if (it != idx.end()) return it->second;
    const int id = static_cast<int>(subsets.size());
    idx[set] = id;
    subsets.push_back(std::move(set));
    d.rank.push_back(0);
    d.delta.push_back({});
    return id;
  };
  auto get_sink = [&]() {
    if (sink < 0) {
      sink = static_cast<int>(subsets.size());
      subsets.push_back({});
      d.rank.push_back(1);
      d.delta.push_back({});
    }
    return sink;
  };

  if (u.rank[u.initial] == 1) {
    d.initial = get_sink();
  } else {
    d.initial = intern({u.initial});
  }
  for (std::size_t pos = 0; pos < subsets.size(); ++pos) {
    if (static_cast<int>(pos) == sink) continue;
    d.delta[pos].assign(letters, 0);
    for (int e = 0; e < letters; ++e) {
      std::set<int> next;
      bool rejected = false;
      for (int q : subsets[pos]) {
        for (int t : u.delta[q][e]) {
          if (u.rank[t] == 1) {
            rejected = true;
            break;
          }
          next.insert(t);
        }
        if (rejected) break;
      }
      d.delta[pos][e] = rejected ? get_sink() : intern({next.begin(), next.end()});
    }
  }
  if (sink >= 0) d.delta[sink].assign(letters, sink);
  return d;
}

SensingGame sensing_game(const Dpw& d, const InputDistribution& dist) {
  if (dist.kind != "uniform") {
    throw ParseError("only the uniform input distribution is supported");
  }
  if (!d.extended) {
    throw DomainError("AlphabetMismatch", "the sensing arena needs an extended-alphabet DPW");
  }
  require_enumerable(d.alphabet, true);

  SensingGame out;
  out.alphabet = d.alphabet;
  out.dpw_states = d.size();
  out.in_bits = d.alphabet.in_bits();
  out.out_bits = d.alphabet.out_bits();
  const int nin = out.in_bits;
  const int ni = 1 << nin;
  const int no = 1 << out.out_bits;

  ParityMDP& m = out.arena;
  m.initial = out.start_id();
  m.states.resize(1 + static_cast<std::size_t>(d.size()) * ni * (1 + ni));

  {
    State& st = m.states[0];
    st.id = 0;
    st.name = "start";
    st.owner = 1;
    st.rank = 0;
    for (int x = 0; x < ni; ++x) {
      for (int o = 0; o < no; ++o) {
        st.actions.push_back({x * no + o,
                              mask_str(x, d.alphabet.inputs) + "/" +
                                  mask_str(o, d.alphabet.outputs),
                              out.p2_id(d.initial, x), Rational()});
      }
    }
  }

  for (int s = 0; s < d.size(); ++s) {
    for (int x = 0; x < ni; ++x) {
      State& env = m.states[out.p2_id(s, x)];
      env.id = out.p2_id(s, x);
      env.name = "s" + std::to_string(s) + "|" + mask_str(x, d.alphabet.inputs);
      env.owner = 2;
      env.rank = d.rank[s];
      env.cost = Rational(popcount(x));
      const Rational p(1, 1 << popcount(x));
      int aid = 0;
      for (int i = 0; i < ni; ++i) {
        if ((i & ~x) != 0) continue;  // one representative per class
        env.actions.push_back({aid++, mask_str(i, d.alphabet.inputs), out.p1_id(s, x, i), p});
      }
      for (int i = 0; i < ni; ++i) {
        State& sys = m.states[out.p1_id(s, x, i)];
        sys.id = out.p1_id(s, x, i);
        sys.name = env.name + "|" + mask_str(i, d.alphabet.inputs);
        sys.owner = 1;
        sys.rank = d.rank[s];
        sys.cost = Rational(popcount(x));
        for (int xn = 0; xn < ni; ++xn) {
          for (int o = 0; o < no; ++o) {
            const int letter = i | (x << nin) | (o << (2 * nin));
            sys.actions.push_back({xn * no + o,
                                   mask_str(xn, d.alphabet.inputs) + "/" +
                                       mask_str(o, d.alphabet.outputs),
                                   out.p2_id(d.delta[s][letter], xn), Rational()});
          }
        }
      }
    }
  }
  return out;
}

SensingPipeline sensing_cost(const Dpw& a, bool finite_memory) {
  SensingPipeline p;
  p.upw = sensing_upw(a);
  p.determinized = determinize_safety(p.upw);
  p.game = sensing_game(p.determinized);
  p.result = finite_memory ? cost_sure_finite(p.game.arena) : cost_sure_infinite(p.game.arena);
  return p;
}

SensingPipeline sensing_cost_determinized(const Dpw& d, bool finite_memory) {
  SensingPipeline p;
  p.determinized = d;
  p.game = sensing_game(d);
  p.result = finite_memory ? cost_sure_finite(p.game.arena) : cost_sure_infinite(p.game.arena);
  return p;
}

namespace {

void derive_sensed(Transducer& t) {
  const int ni = 1 << static_cast<int>(t.inputs.size());
  t.sensed.assign(t.size(), 0);
  for (int q = 0; q < t.size(); ++q) {
    for (std::size_t b = 0; b < t.inputs.size(); ++b) {
      const int bit = 1 << b;
      for (int i = 0; i < ni; ++i) {
        if (t.step[q][i] != t.step[q][i ^ bit]) {
          t.sensed[q] |= bit;
          break;
        }
      }
    }
  }
}

}  // namespace

Transducer extract_transducer(const SensingGame& sg, const FiniteMemoryStrategy& f) {
  if (!certify_finite_strategy(sg.arena, f).sure_winning) {
    throw DomainError("NotWinning", "the strategy is not surely winning from the start state");
  }
  const int ni = 1 << sg.in_bits;
  const int no = 1 << sg.out_bits;

  Transducer t;
  t.inputs = sg.alphabet.inputs;
  t.outputs = sg.alphabet.outputs;

  std::map<std::array<int, 3>, int> ids;
  std::vector<std::array<int, 3>> nodes;
  auto intern = [&](int p2, int mem, int out) {
    const std::array<int, 3> key{p2, mem, out};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(nodes.size());
    ids[key] = id;
    nodes.push_back(key);
    return id;
  };

  const int start = sg.start_id();
  const int m0 = f.enter(start, f.initial_memory);
  const int a0 = f.action_at(start, m0);
  if (a0 < 0 || a0 >= static_cast<int>(sg.arena.states[start].actions.size())) {
    throw InternalError("extract_transducer: strategy undefined at the start state");
  }
  const int first_p2 = sg.arena.states[start].actions[a0].to;
  t.initial = intern(first_p2, f.enter(first_p2, m0), 0);

  for (std::size_t qi = 0; qi < nodes.size(); ++qi) {
    const auto [p2, mem, outw] = nodes[qi];
    (void)outw;
    int s, x;
    sg.decode_p2(p2, s, x);
    t.step.push_back(std::vector<int>(ni, 0));
    for (int i = 0; i < ni; ++i) {
      const int rep = i & x;
      const int c = sg.p1_id(s, x, rep);
      const int m1 = f.enter(c, mem);
      const int a = f.action_at(c, m1);
      if (a < 0 || a >= static_cast<int>(sg.arena.states[c].actions.size())) {
        throw InternalError("extract_transducer: strategy undefined at a reachable state");
      }
      const int onext = a % no;
      const int p2next = sg.arena.states[c].actions[a].to;
      const int m2 = f.enter(p2next, m1);
      t.step[qi][i] = intern(p2next, m2, onext);
    }
  }
  t.label.resize(nodes.size());
  t.declared_sensing.resize(nodes.size());
  for (std::size_t qi = 0; qi < nodes.size(); ++qi) {
    t.label[qi] = nodes[qi][2];
    int s, x;
    sg.decode_p2(nodes[qi][0], s, x);
    t.declared_sensing[qi] = x;
  }
  derive_sensed(t);
  return t;
}

Transducer extract_transducer(const SynthesisGame& g, const FiniteMemoryStrategy& f) {
  if (!verify_finite_memory_winning(g.game, f, {g.game.initial}, nullptr)) {
    throw DomainError("NotWinning", "the strategy is not surely winning from the start state");
  }
  const int ni = 1 << g.in_bits;

  Transducer t;
  t.inputs = g.alphabet.inputs;
  t.outputs = g.alphabet.outputs;

  std::map<std::array<int, 3>, int> ids;
  std::vector<std::array<int, 3>> nodes;
  auto intern = [&](int q, int mem, int out) {
    const std::array<int, 3> key{q, mem, out};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(nodes.size());
    ids[key] = id;
    nodes.push_back(key);
    return id;
  };
  const int q0 = g.game.initial;
  t.initial = intern(q0, f.enter(q0, f.initial_memory), 0);
  for (std::size_t qi = 0; qi < nodes.size(); ++qi) {
    const auto [q, mem, outw] = nodes[qi];
    (void)outw;
    t.step.push_back(std::vector<int>(ni, 0));
    for (int i = 0; i < ni; ++i) {
      const int c = g.choice_id(q, i);
      const int m1 = f.enter(c, mem);
      const int a = f.action_at(c, m1);
      if (a < 0 || a >= static_cast<int>(g.game.states[c].actions.size())) {
        throw InternalError("extract_transducer: strategy undefined at a reachable state");
      }
      const int qn = g.game.states[c].actions[a].to;
      const int m2 = f.enter(qn, m1);
      t.step[qi][i] = intern(qn, m2, a);
    }
  }
  t.label.resize(nodes.size());
  t.declared_sensing.assign(nodes.size(), ni - 1);
  for (std::size_t qi = 0; qi < nodes.size(); ++qi) t.label[qi] = nodes[qi][2];
  derive_sensed(t);
  return t;
}

Rational transducer_expected_sensing_cost(const Transducer& t) {
  const int ni = 1 << static_cast<int>(t.inputs.size());
  Chain c;
  c.rows.resize(t.size());
  for (int q = 0; q < t.size(); ++q) {
    std::map<int, int> hits;
    for (int i = 0; i < ni; ++i) ++hits[t.step[q][i]];
    for (const auto& [succ, count] : hits) {
      c.rows[q].push_back({succ, Rational(count, ni)});
    }
    c.cost.push_back(Rational(popcount(t.sensed[q])));
  }
  return chain_values(c).gain[t.initial];
}

namespace {

SignalAlphabet parse_alphabet(const json& j) {
  SignalAlphabet a;
  for (const auto& v : j.at("inputs")) a.inputs.push_back(v.get<std::string>());
  for (const auto& v : j.at("outputs")) a.outputs.push_back(v.get<std::string>());
  std::set<std::string> seen;
  for (const auto& n : a.inputs) {
    if (!seen.insert(n).second) throw ParseError("duplicate signal name " + n);
  }
  for (const auto& n : a.outputs) {
    if (!seen.insert(n).second) throw ParseError("duplicate signal name " + n);
  }
  return a;
}

int signal_bit(const std::vector<std::string>& names, const std::string& s, int base,
               const char* side) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == s) return base + static_cast<int>(i);
  }
  throw ParseError("unknown " + std::string(side) + " signal " + s);
}

int parse_letter(const SignalAlphabet& al, bool extended, const json& v) {
  int mask = 0;
  if (!extended) {
    if (!v.is_array()) throw ParseError("standard letters are arrays of signal names");
    for (const auto& e : v) {
      const std::string s = e.get<std::string>();
      int bit;
      if (std::find(al.inputs.begin(), al.inputs.end(), s) != al.inputs.end()) {
        bit = signal_bit(al.inputs, s, 0, "input");
      } else {
        bit = signal_bit(al.outputs, s, al.in_bits(), "output");
      }
      if (mask & (1 << bit)) throw ParseError("signal repeated in letter: " + s);
      mask |= 1 << bit;
    }
    return mask;
  }
  if (!v.is_object()) {
    throw ParseError("extended letters are objects with in/sense/out name arrays");
  }
  for (const auto& e : v.at("in")) {
    mask |= 1 << signal_bit(al.inputs, e.get<std::string>(), 0, "input");
  }
  for (const auto& e : v.at("sense")) {
    mask |= 1 << signal_bit(al.inputs, e.get<std::string>(), al.in_bits(), "sensed input");
  }
  for (const auto& e : v.at("out")) {
    mask |= 1 << signal_bit(al.outputs, e.get<std::string>(), 2 * al.in_bits(), "output");
  }
  return mask;
}

json letter_to_json(const SignalAlphabet& al, bool extended, int letter) {
  if (!extended) {
    json arr = json::array();
    for (const auto& n : mask_names(letter, al.inputs)) arr.push_back(n);
    for (const auto& n : mask_names(letter, al.outputs, al.in_bits())) arr.push_back(n);
    return arr;
  }
  json obj;
  obj["in"] = mask_names(letter, al.inputs);
  obj["sense"] = mask_names(letter, al.inputs, al.in_bits());
  obj["out"] = mask_names(letter, al.outputs, 2 * al.in_bits());
  return obj;
}

// Shared state/transition scaffolding of the three automaton kinds.
struct AutomatonShell {
  SignalAlphabet alphabet;
  bool extended = false;
  int initial = 0;
  int states = 0;
  int letters = 0;
};

AutomatonShell parse_shell(const json& j, const char* kind) {
  if (j.at("kind").get<std::string>() != kind) {
    throw ParseError(std::string("expected kind \"") + kind + "\"");
  }
  AutomatonShell sh;
  sh.alphabet = parse_alphabet(j);
  sh.extended = j.value("extended", false);
  require_enumerable(sh.alphabet, sh.extended);
  sh.letters = 1 << (sh.extended ? sh.alphabet.extended_bits() : sh.alphabet.standard_bits());
  const auto& states = j.at("states");
  if (!states.is_array() || states.empty()) throw ParseError("states must be a nonempty array");
  sh.states = static_cast<int>(states.size());
  int expect = 0;
  for (const auto& st : states) {
    if (st.at("id").get<int>() != expect++) {
      throw ParseError("state ids must be dense and in order");
    }
  }
  sh.initial = j.at("initial").get<int>();
  if (sh.initial < 0 || sh.initial >= sh.states) throw ParseError("initial state out of range");
  return sh;
}

}  // namespace

Dpw parse_dpw(const json& j) {
  const AutomatonShell sh = parse_shell(j, "dpw");
  Dpw a;
  a.alphabet = sh.alphabet;
  a.extended = sh.extended;
  a.initial = sh.initial;
  for (const auto& st : j.at("states")) {
    const int r = st.at("rank").get<int>();
    if (r < 0) throw ParseError("ranks must be nonnegative");
    a.rank.push_back(r);
  }
  a.delta.assign(sh.states, std::vector<int>(sh.letters, -1));
  for (const auto& tr : j.at("transitions")) {
    const int from = tr.at("from").get<int>();
    const int to = tr.at("to").get<int>();
    if (from < 0 || from >= sh.states || to < 0 || to >= sh.states) {
      throw ParseError("transition endpoint out of range");
    }
    const int letter = parse_letter(a.alphabet, a.extended, tr.at("letter"));
    if (a.delta[from][letter] != -1) throw ParseError("duplicate transition");
    a.delta[from][letter] = to;
  }
  for (int q = 0; q < sh.states; ++q) {
    for (int e = 0; e < sh.letters; ++e) {
      if (a.delta[q][e] == -1) {
        throw ParseError("missing transition from state " + std::to_string(q));
      }
    }
  }
  return a;
}

Dfw parse_dfw(const json& j) {
  const AutomatonShell sh = parse_shell(j, "dfw");
  if (sh.extended) throw ParseError("monitors use the standard alphabet");
  Dfw a;
  a.alphabet = sh.alphabet;
  a.initial = sh.initial;
  for (const auto& st : j.at("states")) {
    a.accepting.push_back(st.at("accepting").get<bool>() ? 1 : 0);
  }
  a.delta.assign(sh.states, std::vector<int>(sh.letters, -1));
  for (const auto& tr : j.at("transitions")) {
    const int from = tr.at("from").get<int>();
    const int to = tr.at("to").get<int>();
    if (from < 0 || from >= sh.states || to < 0 || to >= sh.states) {
      throw ParseError("transition endpoint out of range");
    }
    const int letter = parse_letter(a.alphabet, false, tr.at("letter"));
    if (a.delta[from][letter] != -1) throw ParseError("duplicate transition");
    a.delta[from][letter] = to;
  }
  for (int q = 0; q < sh.states; ++q) {
    for (int e = 0; e < sh.letters; ++e) {
      if (a.delta[q][e] == -1) {
        throw ParseError("missing transition from state " + std::to_string(q));
      }
    }
  }
  return a;
}

Upw parse_upw(const json& j) {
  const AutomatonShell sh = parse_shell(j, "upw");
  Upw a;
  a.alphabet = sh.alphabet;
  a.extended = sh.extended;
  a.initial = sh.initial;
  for (const auto& st : j.at("states")) {
    const int r = st.at("rank").get<int>();
    if (r < 0) throw ParseError("ranks must be nonnegative");
    a.rank.push_back(r);
  }
  a.delta.assign(sh.states, std::vector<std::vector<int>>(sh.letters));
  for (const auto& tr : j.at("transitions")) {
    const int from = tr.at("from").get<int>();
    if (from < 0 || from >= sh.states) throw ParseError("transition endpoint out of range");
    const int letter = parse_letter(a.alphabet, a.extended, tr.at("letter"));
    if (!a.delta[from][letter].empty()) throw ParseError("duplicate transition");
    std::vector<int> targets;
    for (const auto& tv : tr.at("to")) {
      const int to = tv.get<int>();
      if (to < 0 || to >= sh.states) throw ParseError("transition endpoint out of range");
      targets.push_back(to);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    if (targets.empty()) throw ParseError("universal transition sets must be nonempty");
    a.delta[from][letter] = std::move(targets);
  }
  for (int q = 0; q < sh.states; ++q) {
    for (int e = 0; e < sh.letters; ++e) {
      if (a.delta[q][e].empty()) {
        throw ParseError("missing transition from state " + std::to_string(q));
      }
    }
  }
  return a;
}

PenaltySpec parse_penalty_bundle(const json& j, Dpw& spec_out) {
  spec_out = parse_dpw(j.at("spec"));
  PenaltySpec ps;
  for (const auto& mj : j.at("monitors")) ps.monitors.push_back(parse_dfw(mj));
  for (const auto& gj : j.at("gamma")) {
    const long g = gj.get<long>();
    if (g < 0) throw ParseError("penalties must be nonnegative");
    ps.gamma.push_back(g);
  }
  if (ps.gamma.size() != ps.monitors.size()) {
    throw ParseError("penalty specification needs one gamma per monitor");
  }
  return ps;
}

json dpw_to_json(const Dpw& a) {
  json j;
  j["kind"] = "dpw";
  j["inputs"] = a.alphabet.inputs;
  j["outputs"] = a.alphabet.outputs;
  j["extended"] = a.extended;
  j["initial"] = a.initial;
  json states = json::array();
  for (int q = 0; q < a.size(); ++q) {
    states.push_back({{"id", q}, {"rank", a.rank[q]}});
  }
  j["states"] = std::move(states);
  json trs = json::array();
  for (int q = 0; q < a.size(); ++q) {
    for (int e = 0; e < a.letter_count(); ++e) {
      trs.push_back({{"from", q},
                     {"letter", letter_to_json(a.alphabet, a.extended, e)},
                     {"to", a.delta[q][e]}});
    }
  }
  j["transitions"] = std::move(trs);
  return j;
}

json upw_to_json(const Upw& a) {
  json j;
  j["kind"] = "upw";
  j["inputs"] = a.alphabet.inputs;
  j["outputs"] = a.alphabet.outputs;
  j["extended"] = a.extended;
  j["initial"] = a.initial;
  json states = json::array();
  for (int q = 0; q < a.size(); ++q) {
    states.push_back({{"id", q}, {"rank", a.rank[q]}});
  }
  j["states"] = std::move(states);
  json trs = json::array();
  for (int q = 0; q < a.size(); ++q) {
    for (std::size_t e = 0; e < a.delta[q].size(); ++e) {
      trs.push_back({{"from", q},
                     {"letter", letter_to_json(a.alphabet, a.extended, static_cast<int>(e))},
                     {"to", a.delta[q][e]}});
    }
  }
  j["transitions"] = std::move(trs);
  return j;
}

json transducer_to_json(const Transducer& t) {
  json j;
  j["kind"] = "transducer";
  j["inputs"] = t.inputs;
  j["outputs"] = t.outputs;
  j["initial"] = t.initial;
  json states = json::array();
  for (int q = 0; q < t.size(); ++q) {
    states.push_back({{"id", q},
                      {"output", mask_names(t.label[q], t.outputs)},
                      {"sensed", mask_names(t.sensed[q], t.inputs)},
                      {"declared", mask_names(t.declared_sensing[q], t.inputs)}});
  }
  j["states"] = std::move(states);
  json trs = json::array();
  const int ni = 1 << static_cast<int>(t.inputs.size());
  for (int q = 0; q < t.size(); ++q) {
    for (int i = 0; i < ni; ++i) {
      trs.push_back({{"from", q}, {"input", mask_names(i, t.inputs)}, {"to", t.step[q][i]}});
    }
  }
  j["transitions"] = std::move(trs);
  return j;
}

std::string transducer_to_dot(const Transducer& t) {
  std::ostringstream out;
  out << "digraph transducer {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (int q = 0; q < t.size(); ++q) {
    out << "  q" << q << " [label=\"q" << q << "\\nout: " << mask_str(t.label[q], t.outputs)
        << "\\nsense: " << mask_str(t.sensed[q], t.inputs) << "\"";
    if (q == t.initial) out << ", style=bold";
    out << "];\n";
  }
  const int ni = 1 << static_cast<int>(t.inputs.size());
  for (int q = 0; q < t.size(); ++q) {
    std::map<int, std::vector<std::string>> grouped;
    for (int i = 0; i < ni; ++i) {
      grouped[t.step[q][i]].push_back(mask_str(i, t.inputs));
    }
    for (const auto& [to, labels] : grouped) {
      out << "  q" << q << " -> q" << to << " [label=\"";
      for (std::size_t l = 0; l < labels.size(); ++l) {
        if (l) out << " | ";
        out << labels[l];
      }
      out << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace pmdp
