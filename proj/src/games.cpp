#include "pmdp/games.hpp"

#include <algorithm>
#include <map>

#include "pmdp/errors.hpp"

namespace pmdp {

int ParityGame::max_rank() const {
  int r = 0;
  for (const auto& s : states) r = std::max(r, s.rank);
  return r;
}

ParityGame project_game(const ParityMDP& m) {
  ParityGame g;
  g.initial = m.initial;
  g.states.resize(m.size());
  for (int i = 0; i < m.size(); ++i) {
    const State& s = m.states[i];
    GameState& t = g.states[i];
    t.id = i;
    t.name = s.name;
    t.owner = s.owner;
    t.rank = s.rank;
    for (const Action& a : s.actions) {
      t.actions.push_back({a.id, a.name, a.to});
    }
  }
  return g;
}

namespace {

// Attractor of `player` to `targets` within `active`. Player-owned states
// join when some active action enters the set (that action is recorded in
// `sigma` for states outside the target set); opponent states join when all
// their active actions enter it.
std::vector<char> game_attractor(const ParityGame& g, const std::vector<char>& active,
                                 const std::vector<char>& targets, int player,
                                 std::vector<int>& sigma) {
  const int n = g.size();
  std::vector<int> need(n, 0);
  struct Edge {
    int from;
    int action;
  };
  std::vector<std::vector<Edge>> preds(n);
  for (int s = 0; s < n; ++s) {
    if (!active[s]) continue;
    for (const GameAction& a : g.states[s].actions) {
      if (!active[a.to]) continue;
      ++need[s];
      preds[a.to].push_back({s, a.id});
    }
  }

  std::vector<char> in_attr(n, 0);
  std::vector<int> queue;
  for (int s = 0; s < n; ++s) {
    if (active[s] && targets[s]) {
      in_attr[s] = 1;
      queue.push_back(s);
    }
  }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int t = queue[qi];
    for (const Edge& e : preds[t]) {
      if (in_attr[e.from]) continue;
      if (g.states[e.from].owner == player) {
        in_attr[e.from] = 1;
        sigma[e.from] = e.action;
        queue.push_back(e.from);
      } else if (--need[e.from] == 0) {
        in_attr[e.from] = 1;
        queue.push_back(e.from);
      }
    }
  }
  return in_attr;
}

// Zielonka recursion over an explicit active mask. Strategy arrays are
// global; entries are only meaningful on the final winning regions (masked
// by the caller).
void zielonka(const ParityGame& g, std::vector<char> active, std::vector<char>& w1,
              std::vector<char>& w2, std::vector<int>& s1, std::vector<int>& s2) {
  const int n = g.size();
  int d = -1;
  for (int s = 0; s < n; ++s) {
    if (active[s]) d = std::max(d, g.states[s].rank);
  }
  w1.assign(n, 0);
  w2.assign(n, 0);
  if (d < 0) return;

  const int player = (d % 2 == 0) ? 1 : 2;
  std::vector<char>& wp = (player == 1) ? w1 : w2;
  std::vector<char>& wo = (player == 1) ? w2 : w1;
  std::vector<int>& sp = (player == 1) ? s1 : s2;
  std::vector<int>& so = (player == 1) ? s2 : s1;

  std::vector<char> targets(n, 0);
  for (int s = 0; s < n; ++s) {
    if (active[s] && g.states[s].rank == d) targets[s] = 1;
  }
  std::vector<char> a = game_attractor(g, active, targets, player, sp);

  std::vector<char> sub(n, 0);
  for (int s = 0; s < n; ++s) sub[s] = active[s] && !a[s];
  std::vector<char> w1p, w2p;
  zielonka(g, sub, w1p, w2p, s1, s2);
  std::vector<char>& wop = (player == 1) ? w2p : w1p;

  bool opp_empty = true;
  for (int s = 0; s < n; ++s) {
    if (wop[s]) opp_empty = false;
  }

  if (opp_empty) {
    for (int s = 0; s < n; ++s) {
      if (!active[s]) continue;
      wp[s] = 1;
      if (targets[s] && g.states[s].owner == player) {
        for (const GameAction& ga : g.states[s].actions) {
          if (active[ga.to]) {
            sp[s] = ga.id;
            break;
          }
        }
      }
    }
    return;
  }

  std::vector<char> b = game_attractor(g, active, wop, 3 - player, so);
  std::vector<char> sub2(n, 0);
  for (int s = 0; s < n; ++s) sub2[s] = active[s] && !b[s];
  std::vector<char> w1pp, w2pp;
  zielonka(g, sub2, w1pp, w2pp, s1, s2);
  for (int s = 0; s < n; ++s) {
    wp[s] = (player == 1) ? w1pp[s] : w2pp[s];
    wo[s] = b[s] || ((player == 1) ? w2pp[s] : w1pp[s]);
  }
}

}  // namespace

bool verify_memoryless_winning(const ParityGame& g, const MemorylessStrategy& f,
                               const std::vector<int>& domain, int player) {
  const int n = g.size();
  std::vector<char> in_dom(n, 0);
  for (int s : domain) {
    if (s < 0 || s >= n) return false;
    in_dom[s] = 1;
  }
  // Closure plus the restricted adjacency.
  std::vector<std::vector<int>> adj(n);
  for (int s : domain) {
    const GameState& st = g.states[s];
    if (st.owner == player) {
      const int a = f.at(s);
      if (a < 0 || a >= static_cast<int>(st.actions.size())) return false;
      if (!in_dom[st.actions[a].to]) return false;
      adj[s].push_back(st.actions[a].to);
    } else {
      for (const GameAction& ga : st.actions) {
        if (!in_dom[ga.to]) return false;  // opponent can escape the domain
        adj[s].push_back(ga.to);
      }
    }
  }
  // No cycle whose top rank has the opponent's parity. For each bad rank p,
  // look for a cycle through a rank-p state using only ranks <= p.
  const int bad_parity = (player == 1) ? 1 : 0;
  int maxr = 0;
  for (int s : domain) maxr = std::max(maxr, g.states[s].rank);
  for (int p = bad_parity; p <= maxr; p += 2) {
    std::vector<std::vector<int>> sub(n);
    for (int s : domain) {
      if (g.states[s].rank > p) continue;
      for (int t : adj[s]) {
        if (in_dom[t] && g.states[t].rank <= p) sub[s].push_back(t);
      }
    }
    for (const auto& comp : strongly_connected_components(sub)) {
      if (!in_dom[comp[0]] || g.states[comp[0]].rank > p) continue;
      bool has_p = false;
      for (int s : comp) has_p |= (g.states[s].rank == p);
      if (!has_p) continue;
      bool cycle = comp.size() > 1;
      if (!cycle) {
        for (int t : sub[comp[0]]) cycle |= (t == comp[0]);
      }
      if (cycle) return false;
    }
  }
  return true;
}

GameSolution solve_parity(const ParityGame& g) {
  const int n = g.size();
  GameSolution sol;
  sol.strategy1.action.assign(n, -1);
  sol.strategy2.action.assign(n, -1);
  std::vector<char> active(n, 1), w1, w2;
  zielonka(g, active, w1, w2, sol.strategy1.action, sol.strategy2.action);
  for (int s = 0; s < n; ++s) {
    if (w1[s]) sol.w1.push_back(s);
    if (w2[s]) sol.w2.push_back(s);
    if (!w1[s] || g.states[s].owner != 1) sol.strategy1.action[s] = -1;
    if (!w2[s] || g.states[s].owner != 2) sol.strategy2.action[s] = -1;
  }
  if (!verify_memoryless_winning(g, sol.strategy1, sol.w1, 1) ||
      !verify_memoryless_winning(g, sol.strategy2, sol.w2, 2)) {
    throw InternalError("solve_parity: extracted strategy failed verification");
  }
  return sol;
}

namespace {

// Streett pairs for the parity-Buechi condition: one pair per odd rank p
// present (E = rank-p states, F = higher-rank states) and the recurrence
// pair (E = all states, F = accepting states).
struct StreettPairs {
  int k = 0;
  std::vector<std::vector<char>> e, f;  // [pair][state]
};

StreettPairs streett_pairs(const ParityBuchiGame& g) {
  const int n = g.game.size();
  StreettPairs sp;
  std::vector<int> odds;
  {
    std::vector<char> seen(g.game.max_rank() + 1, 0);
    for (const auto& s : g.game.states) seen[s.rank] = 1;
    for (int p = 1; p < static_cast<int>(seen.size()); p += 2) {
      if (seen[p]) odds.push_back(p);
    }
  }
  for (int p : odds) {
    std::vector<char> e(n, 0), f(n, 0);
    for (int s = 0; s < n; ++s) {
      if (g.game.states[s].rank == p) e[s] = 1;
      if (g.game.states[s].rank > p) f[s] = 1;
    }
    sp.e.push_back(std::move(e));
    sp.f.push_back(std::move(f));
  }
  {
    std::vector<char> e(n, 1), f(n, 0);
    for (int s = 0; s < n; ++s) f[s] = g.accepting[s];
    sp.e.push_back(std::move(e));
    sp.f.push_back(std::move(f));
  }
  sp.k = static_cast<int>(sp.e.size());
  return sp;
}

std::vector<std::vector<int>> all_permutations(int k) {
  std::vector<int> base(k);
  for (int i = 0; i < k; ++i) base[i] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

}  // namespace

ParityBuchiSolution solve_parity_buchi(const ParityBuchiGame& g) {
  const int n = g.game.size();
  if (n == 0) return {};
  auto sp = streett_pairs(g);
  if (sp.k > 8) {
    throw InternalError("solve_parity_buchi: too many record indices for the product");
  }

  auto perms = all_permutations(sp.k);
  const int np = static_cast<int>(perms.size());
  std::map<std::vector<int>, int> perm_idx;
  for (int i = 0; i < np; ++i) perm_idx[perms[i]] = i;
  // Identity permutation comes first in lexicographic enumeration.
  const int id_idx = 0;

  // Per state: pair indices hit as E / as F.
  std::vector<std::vector<int>> hits_e(n), hits_f(n);
  for (int s = 0; s < n; ++s) {
    for (int c = 0; c < sp.k; ++c) {
      if (sp.e[c][s]) hits_e[s].push_back(c);
      if (sp.f[c][s]) hits_f[s].push_back(c);
    }
  }

  // The record lists pair indices; an index's position (1-based) grows
  // toward the back as other indices get refreshed in front of it. On a
  // visit the priority reflects the deepest hit positions, and refreshed
  // (F-hit) indices move to the front keeping their relative order.
  auto priority_at = [&](int s, const std::vector<int>& perm) {
    std::vector<int> pos(sp.k, 0);
    for (int i = 0; i < sp.k; ++i) pos[perm[i]] = i + 1;
    int me = 0, mf = 0;
    for (int c : hits_e[s]) me = std::max(me, pos[c]);
    for (int c : hits_f[s]) mf = std::max(mf, pos[c]);
    int pr = 0;
    if (me > 0) pr = std::max(pr, 2 * me - 1);
    if (mf > 0) pr = std::max(pr, 2 * mf);
    return pr;
  };
  auto update_perm = [&](const std::vector<int>& perm, int s) {
    std::vector<char> hit(sp.k, 0);
    for (int c : hits_f[s]) hit[c] = 1;
    std::vector<int> out;
    out.reserve(sp.k);
    for (int c : perm) {
      if (hit[c]) out.push_back(c);
    }
    for (int c : perm) {
      if (!hit[c]) out.push_back(c);
    }
    return out;
  };

  // Product parity game over (state, record).
  ParityGame prod;
  prod.states.resize(static_cast<std::size_t>(n) * np);
  std::vector<int> upd_idx(static_cast<std::size_t>(n) * np);
  for (int s = 0; s < n; ++s) {
    for (int p = 0; p < np; ++p) {
      upd_idx[static_cast<std::size_t>(s) * np + p] = perm_idx[update_perm(perms[p], s)];
    }
  }
  for (int s = 0; s < n; ++s) {
    const GameState& st = g.game.states[s];
    for (int p = 0; p < np; ++p) {
      const int id = s * np + p;
      GameState& ps = prod.states[id];
      ps.id = id;
      ps.owner = st.owner;
      ps.rank = priority_at(s, perms[p]);
      ps.name = st.name;
      const int tp = upd_idx[id];
      for (const GameAction& a : st.actions) {
        ps.actions.push_back({a.id, a.name, a.to * np + tp});
      }
    }
  }
  prod.initial = g.game.initial * np + id_idx;

  auto psol = solve_parity(prod);
  std::vector<char> pw1(prod.size(), 0);
  for (int s : psol.w1) pw1[s] = 1;

  // The record component never changes who wins; check it.
  ParityBuchiSolution sol;
  for (int s = 0; s < n; ++s) {
    const bool base = pw1[s * np + id_idx];
    for (int p = 0; p < np; ++p) {
      if (static_cast<bool>(pw1[s * np + p]) != base) {
        throw InternalError("solve_parity_buchi: winner depends on the record");
      }
    }
    if (base) sol.w1.push_back(s);
  }

  // Fold the positional product strategy into finite memory over the input
  // game: memory 0 is "not started"; memory (s*np + p) + 1 means the play
  // sits at state s with record p (post-entry).
  FiniteMemoryStrategy& f = sol.strategy;
  f.memory_count = n * np + 1;
  f.initial_memory = 0;
  f.next.assign(n, std::vector<int>(f.memory_count, 0));
  f.act.assign(n, std::vector<int>(f.memory_count, -1));
  for (int t = 0; t < n; ++t) {
    f.next[t][0] = t * np + id_idx + 1;
    for (int mem = 1; mem < f.memory_count; ++mem) {
      const int prev = mem - 1;
      const int pnew = upd_idx[prev];
      f.next[t][mem] = t * np + pnew + 1;
    }
    if (g.game.states[t].owner == 1) {
      for (int mem = 1; mem < f.memory_count; ++mem) {
        const int enc = mem - 1;
        if (enc / np == t) {
          f.act[t][mem] = psol.strategy1.at(enc);
        }
      }
    }
  }

  if (!verify_finite_memory_winning(g.game, f, sol.w1, &g.accepting)) {
    throw InternalError("solve_parity_buchi: folded strategy failed verification");
  }
  return sol;
}

bool verify_finite_memory_winning(const ParityGame& g, const FiniteMemoryStrategy& f,
                                  const std::vector<int>& starts,
                                  const std::vector<char>* accepting) {
  const int n = g.size();
  if (static_cast<int>(f.next.size()) != n || static_cast<int>(f.act.size()) != n) return false;
  const long mc = f.memory_count;
  auto enc = [&](int s, int mem) { return static_cast<long>(s) * mc + mem; };

  std::map<long, int> node_id;
  std::vector<std::pair<int, int>> nodes;
  std::vector<long> queue;
  auto intern = [&](int s, int mem) {
    const long key = enc(s, mem);
    auto it = node_id.find(key);
    if (it != node_id.end()) return it->second;
    const int id = static_cast<int>(nodes.size());
    node_id[key] = id;
    nodes.push_back({s, mem});
    queue.push_back(key);
    return id;
  };
  for (int s : starts) {
    if (s < 0 || s >= n) return false;
    intern(s, f.enter(s, f.initial_memory));
  }
  std::vector<std::vector<int>> adj;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const long key = queue[qi];
    const int s = static_cast<int>(key / mc);
    const int mem = static_cast<int>(key % mc);
    const int id = node_id[key];
    if (static_cast<int>(adj.size()) <= id) adj.resize(id + 1);
    const GameState& st = g.states[s];
    std::vector<int> succs;
    if (st.owner == 1) {
      const int a = f.action_at(s, mem);
      if (a < 0 || a >= static_cast<int>(st.actions.size())) return false;
      succs.push_back(st.actions[a].to);
    } else {
      for (const GameAction& ga : st.actions) succs.push_back(ga.to);
    }
    for (int t : succs) {
      adj[id].push_back(intern(t, f.enter(t, mem)));
    }
  }
  adj.resize(nodes.size());

  const int total = static_cast<int>(nodes.size());
  int maxr = 0;
  for (const auto& [s, mem] : nodes) maxr = std::max(maxr, g.states[s].rank);

  // Parity: no reachable cycle with odd top rank.
  for (int p = 1; p <= maxr; p += 2) {
    std::vector<std::vector<int>> sub(total);
    for (int i = 0; i < total; ++i) {
      if (g.states[nodes[i].first].rank > p) continue;
      for (int j : adj[i]) {
        if (g.states[nodes[j].first].rank <= p) sub[i].push_back(j);
      }
    }
    for (const auto& comp : strongly_connected_components(sub)) {
      if (g.states[nodes[comp[0]].first].rank > p) continue;
      bool has_p = false;
      for (int i : comp) has_p |= (g.states[nodes[i].first].rank == p);
      if (!has_p) continue;
      bool cycle = comp.size() > 1;
      if (!cycle) {
        for (int j : sub[comp[0]]) cycle |= (j == comp[0]);
      }
      if (cycle) return false;
    }
  }

  // Recurrence: no reachable cycle made only of non-accepting states.
  if (accepting != nullptr) {
    std::vector<std::vector<int>> sub(total);
    for (int i = 0; i < total; ++i) {
      if ((*accepting)[nodes[i].first]) continue;
      for (int j : adj[i]) {
        if (!(*accepting)[nodes[j].first]) sub[i].push_back(j);
      }
    }
    for (const auto& comp : strongly_connected_components(sub)) {
      if ((*accepting)[nodes[comp[0]].first]) continue;
      bool cycle = comp.size() > 1;
      if (!cycle) {
        for (int j : sub[comp[0]]) cycle |= (j == comp[0]);
      }
      if (cycle) return false;
    }
  }
  return true;
}

std::vector<int> peak_states(const ParityMDP& m, const EndComponent& c) {
  int max_odd = -1;
  for (int s : c.states) {
    if (m.states[s].rank % 2 == 1) max_odd = std::max(max_odd, m.states[s].rank);
  }
  std::vector<int> out;
  for (int s : c.states) {
    if (m.states[s].rank % 2 == 0 && m.states[s].rank > max_odd) out.push_back(s);
  }
  return out;
}

SgecGadget build_sgec_gadget(const ParityMDP& m, const EndComponent& c) {
  const int n = m.size();
  SgecGadget gg;
  gg.orig_of.clear();
  gg.node_of.assign(n, -1);
  gg.silent_branch_of.assign(n, -1);
  gg.flagged_branch_of.assign(n, -1);
  gg.is_peak.assign(n, 0);
  gg.peak_states = peak_states(m, c);
  for (int s : gg.peak_states) gg.is_peak[s] = 1;

  std::vector<char> in_c(n, 0);
  for (int s : c.states) in_c[s] = 1;

  auto new_state = [&](const std::string& name, int owner, int rank, bool acc, int orig) {
    const int id = static_cast<int>(gg.game.game.states.size());
    GameState st;
    st.id = id;
    st.name = name;
    st.owner = owner;
    st.rank = rank;
    gg.game.game.states.push_back(std::move(st));
    gg.game.accepting.push_back(acc ? 1 : 0);
    gg.orig_of.push_back(orig);
    gg.action_map.push_back({});
    return id;
  };

  // Main nodes first.
  for (int s : c.states) {
    const State& st = m.states[s];
    gg.node_of[s] = new_state(st.name, st.owner, st.rank, gg.is_peak[s], s);
  }
  // Branch nodes for split environment states.
  for (int s : c.states) {
    const State& st = m.states[s];
    if (st.owner != 2 || gg.is_peak[s]) continue;
    gg.silent_branch_of[s] = new_state(st.name + "#silent", 1, 0, false, -1);
    gg.flagged_branch_of[s] = new_state(st.name + "#flagged", 2, 0, true, -1);
  }

  // Wiring.
  for (int s : c.states) {
    const State& st = m.states[s];
    const int node = gg.node_of[s];
    GameState& gs = gg.game.game.states[node];
    if (gg.is_peak[s]) {
      gs.actions.push_back({0, "stay", node});
      gg.action_map[node].push_back(-1);
      continue;
    }
    if (st.owner == 1) {
      for (const Action& a : st.actions) {
        if (!in_c[a.to]) continue;
        const int gid = static_cast<int>(gs.actions.size());
        gs.actions.push_back({gid, a.name, gg.node_of[a.to]});
        gg.action_map[node].push_back(a.id);
      }
      if (gs.actions.empty()) {
        throw DomainError("NotEC", "system state " + st.name + " has no action inside the set");
      }
      continue;
    }
    // Split environment state: choice between the branch copies.
    const int b1 = gg.silent_branch_of[s];
    const int b2 = gg.flagged_branch_of[s];
    gs.actions.push_back({0, "silent", b1});
    gs.actions.push_back({1, "flagged", b2});
    gg.action_map[node].push_back(-1);
    gg.action_map[node].push_back(-1);
    for (int branch : {b1, b2}) {
      GameState& bs = gg.game.game.states[branch];
      for (const Action& a : st.actions) {
        if (!in_c[a.to]) continue;
        const int gid = static_cast<int>(bs.actions.size());
        bs.actions.push_back({gid, a.name, gg.node_of[a.to]});
        gg.action_map[branch].push_back(a.id);
      }
      if (bs.actions.empty()) {
        throw DomainError("NotEC",
                          "environment state " + st.name + " has no edge inside the set");
      }
    }
  }
  gg.game.game.initial = gg.node_of[c.states.front()];
  return gg;
}

namespace {

// Builds the arena-level witness from the gadget solution. Arena memory is
// a pair (previous arena state, gadget-strategy memory at it); entering the
// next state replays the corresponding one- or two-step gadget move. When
// the previous state was a peak sink, the simulated gadget play restarts.
FiniteMemoryStrategy fold_witness(const ParityMDP& m, const EndComponent& c,
                                  const SgecGadget& gg, const ParityBuchiSolution& gsol) {
  const int n = m.size();
  const FiniteMemoryStrategy& gs = gsol.strategy;
  const int mc = gs.memory_count;
  const ParityGame& gg_game = gg.game.game;

  std::vector<char> in_c(n, 0);
  for (int s : c.states) in_c[s] = 1;

  FiniteMemoryStrategy f;
  f.memory_count = n * mc + 1;
  f.initial_memory = 0;
  f.next.assign(n, std::vector<int>(f.memory_count, 0));
  f.act.assign(n, std::vector<int>(f.memory_count, -1));

  auto enc = [&](int s, int gm) { return s * mc + gm + 1; };

  // Smallest staying action for sink states owned by the system.
  std::vector<int> stay_action(n, -1);
  for (int s : c.states) {
    if (m.states[s].owner != 1) continue;
    for (const Action& a : m.states[s].actions) {
      if (in_c[a.to]) {
        stay_action[s] = a.id;
        break;
      }
    }
  }

  for (int t = 0; t < n; ++t) {
    if (!in_c[t]) continue;
    const int node_t = gg.node_of[t];
    // Fresh entry.
    f.next[t][0] = enc(t, gs.enter(node_t, gs.initial_memory));
    for (int s = 0; s < n; ++s) {
      if (!in_c[s]) continue;
      for (int gm = 0; gm < mc; ++gm) {
        const int mem = enc(s, gm);
        int gm_t;
        if (gg.is_peak[s]) {
          // Obligations fulfilled at the sink; restart the gadget play.
          gm_t = gs.enter(node_t, gs.initial_memory);
        } else if (m.states[s].owner == 1) {
          gm_t = gs.enter(node_t, gm);
        } else {
          // Two-step simulation through a branch node. Prefer the silent
          // branch when the gadget strategy's prediction there matches the
          // real successor; otherwise take the flagged branch, where the
          // environment may move anywhere.
          const int b1 = gg.silent_branch_of[s];
          const int b2 = gg.flagged_branch_of[s];
          const int m_b1 = gs.enter(b1, gm);
          const int a1 = gs.action_at(b1, m_b1);
          bool silent_ok = false;
          if (a1 >= 0 && a1 < static_cast<int>(gg_game.states[b1].actions.size())) {
            silent_ok = (gg_game.states[b1].actions[a1].to == node_t);
          }
          const int m_x = silent_ok ? m_b1 : gs.enter(b2, gm);
          gm_t = gs.enter(node_t, m_x);
        }
        f.next[t][mem] = enc(t, gm_t);
      }
    }
    // Actions: consulted with post-entry memory enc(t, gm).
    if (m.states[t].owner == 1) {
      for (int gm = 0; gm < mc; ++gm) {
        const int mem = enc(t, gm);
        if (gg.is_peak[t]) {
          f.act[t][mem] = stay_action[t];
        } else {
          const int ga = gs.action_at(node_t, gm);
          if (ga >= 0 && ga < static_cast<int>(gg.action_map[node_t].size())) {
            f.act[t][mem] = gg.action_map[node_t][ga];
          }
        }
      }
    }
  }
  return f;
}

}  // namespace

bool check_sgec_witness(const ParityMDP& m, const EndComponent& c, const std::vector<int>& w,
                        const std::vector<int>& peaks, const FiniteMemoryStrategy& h) {
  const int n = m.size();
  std::vector<char> in_c(n, 0);
  for (int s : c.states) in_c[s] = 1;
  std::vector<char> is_peak(n, 0);
  for (int s : peaks) is_peak[s] = 1;

  const long mc = h.memory_count;
  std::map<long, int> node_id;
  std::vector<std::pair<int, int>> nodes;
  std::vector<long> keys;
  auto intern = [&](int s, int mem) {
    const long key = static_cast<long>(s) * mc + mem;
    auto it = node_id.find(key);
    if (it != node_id.end()) return it->second;
    const int id = static_cast<int>(nodes.size());
    node_id[key] = id;
    nodes.push_back({s, mem});
    keys.push_back(key);
    return id;
  };
  for (int s : w) intern(s, h.enter(s, h.initial_memory));

  std::vector<std::vector<int>> adj;
  for (std::size_t qi = 0; qi < keys.size(); ++qi) {
    const int s = static_cast<int>(keys[qi] / mc);
    const int mem = static_cast<int>(keys[qi] % mc);
    const int id = node_id[keys[qi]];
    if (static_cast<int>(adj.size()) <= id) adj.resize(id + 1);
    const State& st = m.states[s];
    std::vector<int> succs;
    if (st.owner == 1) {
      const int a = h.action_at(s, mem);
      if (a < 0 || a >= static_cast<int>(st.actions.size())) return false;
      if (!in_c[st.actions[a].to]) return false;
      succs.push_back(st.actions[a].to);
    } else {
      for (const Action& a : st.actions) {
        if (a.prob.sign() <= 0) continue;
        if (!in_c[a.to]) return false;
        succs.push_back(a.to);
      }
    }
    for (int t : succs) adj[id].push_back(intern(t, h.enter(t, mem)));
  }
  adj.resize(nodes.size());
  const int total = static_cast<int>(nodes.size());

  // (a) Peaks reached with probability one: with peak nodes cut off, every
  // bottom SCC of the reachable product must contain a peak node.
  {
    std::vector<std::vector<int>> cut(total);
    for (int i = 0; i < total; ++i) {
      if (is_peak[nodes[i].first]) continue;
      cut[i] = adj[i];
    }
    auto comps = strongly_connected_components(cut);
    for (const auto& comp : comps) {
      bool has_peak = false;
      for (int i : comp) has_peak |= static_cast<bool>(is_peak[nodes[i].first]);
      if (has_peak) continue;
      bool leaves = false;
      std::vector<char> inside(total, 0);
      for (int i : comp) inside[i] = 1;
      for (int i : comp) {
        for (int j : cut[i]) {
          if (!inside[j]) leaves = true;
        }
      }
      if (!leaves) return false;  // closed fate avoiding every peak
    }
  }

  // (b) Any play avoiding the peaks satisfies parity: cycle analysis on the
  // peak-free restriction.
  int maxr = 0;
  for (int i = 0; i < total; ++i) maxr = std::max(maxr, m.states[nodes[i].first].rank);
  for (int p = 1; p <= maxr; p += 2) {
    std::vector<std::vector<int>> sub(total);
    for (int i = 0; i < total; ++i) {
      const int s = nodes[i].first;
      if (is_peak[s] || m.states[s].rank > p) continue;
      for (int j : adj[i]) {
        const int t = nodes[j].first;
        if (!is_peak[t] && m.states[t].rank <= p) sub[i].push_back(j);
      }
    }
    for (const auto& comp : strongly_connected_components(sub)) {
      const int s0 = nodes[comp[0]].first;
      if (is_peak[s0] || m.states[s0].rank > p) continue;
      bool has_p = false;
      for (int i : comp) has_p |= (m.states[nodes[i].first].rank == p);
      if (!has_p) continue;
      bool cycle = comp.size() > 1;
      if (!cycle) {
        for (int j : sub[comp[0]]) cycle |= (j == comp[0]);
      }
      if (cycle) return false;
    }
  }
  return true;
}

SuperGoodResult super_good_states(const ParityMDP& m, const EndComponent& c) {
  if (!is_end_component(m, c.states)) {
    throw DomainError("NotEC", "state set is not an end component");
  }
  SuperGoodResult out;
  int top = 0;
  for (int s : c.states) top = std::max(top, m.states[s].rank);
  if (top % 2 == 1) return out;  // immediately hopeless: top rank is odd

  auto gg = build_sgec_gadget(m, c);
  auto gsol = solve_parity_buchi(gg.game);
  std::vector<char> win(gg.game.game.size(), 0);
  for (int s : gsol.w1) win[s] = 1;
  for (int s : c.states) {
    if (win[gg.node_of[s]]) out.super_good.push_back(s);
  }
  out.is_sgec = (out.super_good.size() == c.states.size());
  if (out.is_sgec) {
    FiniteMemoryStrategy h = fold_witness(m, c, gg, gsol);
    if (!check_sgec_witness(m, c, out.super_good, gg.peak_states, h)) {
      throw InternalError("super_good_states: folded witness failed validation");
    }
    out.witness = std::move(h);
  }
  return out;
}

}  // namespace pmdp
