#include "pmdp/mdp.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pmdp/errors.hpp"

namespace pmdp {

namespace {

// Bottom strongly connected components of the chain graph, i.e. the
// recurrent classes, plus a recurrent/transient marking.
struct ChainClasses {
  std::vector<std::vector<int>> recurrent;  // each sorted
  std::vector<int> class_of;                // state -> recurrent class index or -1
};

ChainClasses chain_classes(const Chain& c) {
  const int n = c.size();
  std::vector<std::vector<int>> adj(n);
  for (int s = 0; s < n; ++s) {
    for (const auto& [t, p] : c.rows[s]) adj[s].push_back(t);
  }
  auto comps = strongly_connected_components(adj);
  ChainClasses out;
  out.class_of.assign(n, -1);
  for (const auto& comp : comps) {
    std::vector<char> inside(n, 0);
    for (int s : comp) inside[s] = 1;
    bool closed = true;
    for (int s : comp) {
      for (const auto& [t, p] : c.rows[s]) {
        if (!inside[t]) closed = false;
      }
    }
    // A chain state always carries outgoing mass, so a closed SCC is
    // recurrent, including self-loop singletons; a loop-free singleton is
    // never closed.
    if (closed && !(comp.size() == 1 && adj[comp[0]].empty())) {
      bool self_ok = comp.size() > 1;
      if (!self_ok) {
        for (int t : adj[comp[0]]) self_ok |= (t == comp[0]);
      }
      if (self_ok) {
        for (int s : comp) out.class_of[s] = static_cast<int>(out.recurrent.size());
        out.recurrent.push_back(comp);
      }
    }
  }
  return out;
}

}  // namespace

ChainValues chain_values(const Chain& c) {
  const int n = c.size();
  ChainValues out;
  out.gain.assign(n, Rational(0));
  out.bias.assign(n, Rational(0));
  if (n == 0) return out;

  auto classes = chain_classes(c);
  if (classes.recurrent.empty()) {
    throw InternalError("chain_values: no recurrent class in a finite chain");
  }

  // Dense transition lookup per recurrent class.
  for (const auto& rec : classes.recurrent) {
    const int k = static_cast<int>(rec.size());
    std::vector<int> pos(n, -1);
    for (int i = 0; i < k; ++i) pos[rec[i]] = i;

    // Stationary distribution: for all but the last state t of the class,
    // sum_s pi(s) P(s,t) - pi(t) = 0; the last equation normalizes the sum.
    Mat a(k, Vec(k, Rational(0)));
    Vec b(k, Rational(0));
    for (int i = 0; i < k; ++i) {
      const int s = rec[i];
      for (const auto& [t, p] : c.rows[s]) {
        const int j = pos[t];
        if (j >= 0 && j < k - 1) a[j][i] += p;
      }
    }
    for (int i = 0; i < k - 1; ++i) a[i][i] -= Rational(1);
    for (int i = 0; i < k; ++i) a[k - 1][i] = Rational(1);
    b[k - 1] = Rational(1);
    Vec pi = solve_linear(std::move(a), std::move(b));

    Rational g(0);
    for (int i = 0; i < k; ++i) g += pi[i] * c.cost[rec[i]];
    for (int s : rec) out.gain[s] = g;

    // Bias within the class: b(s) = cost(s) - g + sum P(s,t) b(t), pinned to
    // zero at the smallest-id state.
    Mat ab(k, Vec(k, Rational(0)));
    Vec bb(k, Rational(0));
    for (int i = 0; i < k; ++i) {
      const int s = rec[i];
      if (i == 0) {
        ab[0][0] = Rational(1);
        bb[0] = Rational(0);
        continue;
      }
      ab[i][i] = Rational(1);
      for (const auto& [t, p] : c.rows[s]) {
        ab[i][pos[t]] -= p;
      }
      bb[i] = c.cost[s] - g;
    }
    Vec bias = solve_linear(std::move(ab), std::move(bb));
    for (int i = 0; i < k; ++i) out.bias[rec[i]] = bias[i];
  }

  // Transient states: gains are harmonic, biases follow the cost equation.
  std::vector<int> transient;
  for (int s = 0; s < n; ++s) {
    if (classes.class_of[s] < 0) transient.push_back(s);
  }
  if (!transient.empty()) {
    const int k = static_cast<int>(transient.size());
    std::vector<int> pos(n, -1);
    for (int i = 0; i < k; ++i) pos[transient[i]] = i;
    Mat a(k, Vec(k, Rational(0)));
    Mat rhs(k, Vec(2, Rational(0)));  // column 0: gain, column 1: bias offset
    for (int i = 0; i < k; ++i) {
      const int s = transient[i];
      a[i][i] = Rational(1);
      for (const auto& [t, p] : c.rows[s]) {
        if (pos[t] >= 0) {
          a[i][pos[t]] -= p;
        } else {
          rhs[i][0] += p * out.gain[t];
          rhs[i][1] += p * out.bias[t];
        }
      }
    }
    // First solve gains, then biases (bias equation needs the state's own
    // gain on the right-hand side).
    Mat acopy = a;
    Mat gsol = solve_linear_multi(std::move(acopy), [&] {
      Mat r(k, Vec(1, Rational(0)));
      for (int i = 0; i < k; ++i) r[i][0] = rhs[i][0];
      return r;
    }());
    for (int i = 0; i < k; ++i) out.gain[transient[i]] = gsol[i][0];

    Mat brhs(k, Vec(1, Rational(0)));
    for (int i = 0; i < k; ++i) {
      const int s = transient[i];
      brhs[i][0] = c.cost[s] - out.gain[s] + rhs[i][1];
    }
    Mat bsol = solve_linear_multi(std::move(a), std::move(brhs));
    for (int i = 0; i < k; ++i) out.bias[transient[i]] = bsol[i][0];
  }
  return out;
}

Vec chain_gain(const Chain& c) { return chain_values(c).gain; }

InducedChain induced_chain(const ParityMDP& m, const MemorylessStrategy& f,
                           const std::vector<int>* domain, const Vec* cost_override) {
  InducedChain out;
  const int n = m.size();
  std::vector<char> active(n, domain == nullptr ? 1 : 0);
  if (domain) {
    for (int s : *domain) {
      if (s >= 0 && s < n) active[s] = 1;
    }
  }
  out.arena_to_idx.assign(n, -1);
  for (int s = 0; s < n; ++s) {
    if (active[s]) {
      out.arena_to_idx[s] = static_cast<int>(out.index_map.size());
      out.index_map.push_back(s);
    }
  }
  const int k = static_cast<int>(out.index_map.size());
  out.chain.rows.resize(k);
  out.chain.cost.resize(k);
  for (int i = 0; i < k; ++i) {
    const int s = out.index_map[i];
    const State& st = m.states[s];
    out.chain.cost[i] = cost_override ? (*cost_override)[s] : st.cost;
    if (st.owner == 1) {
      const int a = f.at(s);
      if (a < 0 || a >= static_cast<int>(st.actions.size())) {
        throw DomainError("InvalidRestriction",
                          "strategy undefined at system state " + st.name);
      }
      const int t = st.actions[a].to;
      if (out.arena_to_idx[t] < 0) {
        throw DomainError("InvalidRestriction",
                          "strategy leaves the domain at state " + st.name);
      }
      out.chain.rows[i].push_back({out.arena_to_idx[t], Rational(1)});
    } else {
      std::map<int, Rational> merged;
      for (const Action& a : st.actions) {
        if (a.prob.sign() <= 0) continue;
        if (out.arena_to_idx[a.to] < 0) {
          throw DomainError("InvalidRestriction",
                            "positive environment edge leaves the domain at " + st.name);
        }
        merged[out.arena_to_idx[a.to]] += a.prob;
      }
      for (const auto& [t, p] : merged) out.chain.rows[i].push_back({t, p});
    }
  }
  return out;
}

namespace {

struct ActiveSet {
  std::vector<char> mask;
  std::vector<int> states;
};

ActiveSet active_set(const ParityMDP& m, const std::vector<int>* domain) {
  ActiveSet a;
  a.mask.assign(m.size(), domain == nullptr ? 1 : 0);
  if (domain) {
    for (int s : *domain) {
      if (s >= 0 && s < m.size()) a.mask[s] = 1;
    }
  }
  for (int s = 0; s < m.size(); ++s) {
    if (a.mask[s]) a.states.push_back(s);
  }
  return a;
}

}  // namespace

MeanPayoffSolution min_mean_payoff(const ParityMDP& m, const std::vector<int>* domain,
                                   const Vec* cost_override) {
  auto act = active_set(m, domain);
  const int n = m.size();

  MeanPayoffSolution sol;
  sol.strategy.action.assign(n, -1);
  sol.gain.assign(n, Rational(0));
  sol.bias.assign(n, Rational(0));

  // In-domain actions per system state; initial policy: smallest action id.
  std::vector<std::vector<int>> choices(n);
  for (int s : act.states) {
    const State& st = m.states[s];
    if (st.owner != 1) continue;
    for (const Action& a : st.actions) {
      if (act.mask[a.to]) choices[s].push_back(a.id);
    }
    if (choices[s].empty()) {
      throw DomainError("InvalidRestriction",
                        "system state " + st.name + " has no action inside the domain");
    }
    sol.strategy.action[s] = choices[s].front();
  }

  std::set<std::vector<int>> seen_policies;
  const int max_rounds = 100000;
  InducedChain ic;
  ChainValues vals;
  for (int round = 0;; ++round) {
    if (round > max_rounds) throw InternalError("min_mean_payoff: policy iteration diverged");
    if (!seen_policies.insert(sol.strategy.action).second) {
      throw InternalError("min_mean_payoff: policy iteration cycled");
    }
    ic = induced_chain(m, sol.strategy, domain, cost_override);
    vals = chain_values(ic.chain);

    auto g = [&](int arena_state) { return vals.gain[ic.arena_to_idx[arena_state]]; };
    auto b = [&](int arena_state) { return vals.bias[ic.arena_to_idx[arena_state]]; };

    bool improved = false;
    // Gain step.
    for (int s : act.states) {
      if (m.states[s].owner != 1) continue;
      const int cur = sol.strategy.action[s];
      int best = cur;
      Rational bestg = g(m.states[s].actions[cur].to);
      for (int aid : choices[s]) {
        Rational cand = g(m.states[s].actions[aid].to);
        if (cand < bestg) {
          bestg = cand;
          best = aid;
        }
      }
      if (best != cur && bestg < g(m.states[s].actions[cur].to)) {
        sol.strategy.action[s] = best;
        improved = true;
      }
    }
    if (improved) continue;

    // Bias step among gain-conserving actions.
    for (int s : act.states) {
      if (m.states[s].owner != 1) continue;
      const int cur = sol.strategy.action[s];
      const Rational gs = g(m.states[s].actions[cur].to);
      int best = cur;
      Rational bestb = b(m.states[s].actions[cur].to);
      for (int aid : choices[s]) {
        if (g(m.states[s].actions[aid].to) != gs) continue;
        Rational cand = b(m.states[s].actions[aid].to);
        if (cand < bestb) {
          bestb = cand;
          best = aid;
        }
      }
      if (best != cur && bestb < b(m.states[s].actions[cur].to)) {
        sol.strategy.action[s] = best;
        improved = true;
      }
    }
    if (!improved) break;
  }

  // Optimality equations: no action improves the gain, and no
  // gain-conserving action improves the bias.
  for (int s : act.states) {
    if (m.states[s].owner != 1) continue;
    const int cur = sol.strategy.action[s];
    const Rational gs = vals.gain[ic.arena_to_idx[m.states[s].actions[cur].to]];
    const Rational bs = vals.bias[ic.arena_to_idx[m.states[s].actions[cur].to]];
    for (int aid : choices[s]) {
      const int t = m.states[s].actions[aid].to;
      if (vals.gain[ic.arena_to_idx[t]] < gs) {
        throw InternalError("min_mean_payoff: gain fixpoint violated");
      }
      if (vals.gain[ic.arena_to_idx[t]] == gs && vals.bias[ic.arena_to_idx[t]] < bs) {
        throw InternalError("min_mean_payoff: bias fixpoint violated");
      }
    }
  }

  for (int s : act.states) {
    sol.gain[s] = vals.gain[ic.arena_to_idx[s]];
    sol.bias[s] = vals.bias[ic.arena_to_idx[s]];
  }
  return sol;
}

EcSolution ec_solve(const ParityMDP& m, const EndComponent& c) {
  if (!is_end_component(m, c.states)) {
    throw DomainError("NotEC", "state set is not an end component");
  }
  auto sol = min_mean_payoff(m, &c.states);
  Rational v = sol.gain[c.states.front()];
  for (int s : c.states) {
    if (sol.gain[s] != v) {
      throw InternalError("NotConstant: optimal gain differs inside an end component");
    }
  }
  return {v, sol.strategy};
}

Rational ec_value(const ParityMDP& m, const EndComponent& c) { return ec_solve(m, c).value; }

std::vector<int> almost_sure_reach(const ParityMDP& m, const std::vector<int>& domain,
                                   const std::vector<int>& target) {
  const int n = m.size();
  std::vector<char> in_u(n, 0);
  for (int s : domain) in_u[s] = 1;
  std::vector<char> in_t(n, 0);
  for (int s : target) {
    if (in_u[s]) in_t[s] = 1;
  }

  // Greatest fixpoint over U: keep only states from which the target is
  // reached with probability one while staying in U. Inner least fixpoint R:
  // target states; system states with an action into R staying in U;
  // environment states whose positive edges all stay in U with one entering
  // R.
  while (true) {
    std::vector<char> in_r(n, 0);
    bool grew = true;
    std::vector<int> r;
    for (int s = 0; s < n; ++s) {
      if (in_u[s] && in_t[s]) {
        in_r[s] = 1;
        r.push_back(s);
      }
    }
    while (grew) {
      grew = false;
      for (int s = 0; s < n; ++s) {
        if (!in_u[s] || in_r[s]) continue;
        const State& st = m.states[s];
        bool join = false;
        if (st.owner == 1) {
          for (const Action& a : st.actions) {
            if (in_u[a.to] && in_r[a.to]) join = true;
          }
        } else {
          bool all_in_u = true;
          bool one_in_r = false;
          for (const Action& a : st.actions) {
            if (a.prob.sign() <= 0) continue;
            if (!in_u[a.to]) all_in_u = false;
            if (in_r[a.to]) one_in_r = true;
          }
          join = all_in_u && one_in_r;
        }
        if (join) {
          in_r[s] = 1;
          grew = true;
        }
      }
    }
    bool shrunk = false;
    for (int s = 0; s < n; ++s) {
      if (in_u[s] && !in_r[s]) {
        in_u[s] = 0;
        shrunk = true;
      }
    }
    if (!shrunk) break;
  }
  std::vector<int> out;
  for (int s = 0; s < n; ++s) {
    if (in_u[s]) out.push_back(s);
  }
  return out;
}

ReachSolution max_reach(const ParityMDP& m, const EndComponent& component,
                        const std::vector<int>& target) {
  const int n = m.size();
  ReachSolution sol;
  sol.value.assign(n, Rational(0));
  sol.strategy.action.assign(n, -1);

  std::vector<char> in_c(n, 0);
  for (int s : component.states) in_c[s] = 1;
  std::vector<char> in_t(n, 0);
  std::vector<int> targets;
  for (int s : target) {
    if (s >= 0 && s < n && in_c[s] && !in_t[s]) {
      in_t[s] = 1;
      targets.push_back(s);
    }
  }

  // Value-zero region: no path to the target through in-component edges.
  std::vector<char> can_reach(n, 0);
  {
    std::vector<std::vector<int>> rpred(n);
    for (int s : component.states) {
      for (const Action& a : m.states[s].actions) {
        if (!in_c[a.to]) continue;
        if (m.states[s].owner == 2 && a.prob.sign() <= 0) continue;
        rpred[a.to].push_back(s);
      }
    }
    std::vector<int> queue = targets;
    for (int s : targets) can_reach[s] = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      for (int p : rpred[queue[qi]]) {
        if (!can_reach[p]) {
          can_reach[p] = 1;
          queue.push_back(p);
        }
      }
    }
  }

  // In-component action lists and initial policy (smallest id).
  std::vector<std::vector<int>> choices(n);
  for (int s : component.states) {
    if (m.states[s].owner != 1) continue;
    for (const Action& a : m.states[s].actions) {
      if (in_c[a.to]) choices[s].push_back(a.id);
    }
    if (choices[s].empty()) {
      throw DomainError("NotEC", "system state " + m.states[s].name +
                                     " has no action inside the component");
    }
    sol.strategy.action[s] = choices[s].front();
  }

  // Truthful evaluation of the current policy: target states 1, then the
  // policy chain's recurrent classes that avoid the target get 0, and the
  // rest is the unique solution of the linear absorption system.
  auto evaluate = [&]() {
    Vec x(n, Rational(0));
    for (int s : targets) x[s] = Rational(1);
    // Chain over the non-target component states.
    std::vector<int> inner;
    for (int s : component.states) {
      if (!in_t[s]) inner.push_back(s);
    }
    std::vector<int> pos(n, -1);
    for (std::size_t i = 0; i < inner.size(); ++i) pos[inner[i]] = static_cast<int>(i);

    // Rows of the policy chain on inner states; edges to targets recorded
    // as absorption mass.
    const int k = static_cast<int>(inner.size());
    std::vector<std::vector<std::pair<int, Rational>>> rows(k);
    Vec hit(k, Rational(0));
    for (int i = 0; i < k; ++i) {
      const int s = inner[i];
      const State& st = m.states[s];
      if (st.owner == 1) {
        const int t = st.actions[sol.strategy.action[s]].to;
        if (in_t[t]) {
          hit[i] += Rational(1);
        } else {
          rows[i].push_back({pos[t], Rational(1)});
        }
      } else {
        std::map<int, Rational> merged;
        for (const Action& a : st.actions) {
          if (a.prob.sign() <= 0) continue;
          if (in_t[a.to]) {
            hit[i] += a.prob;
          } else {
            merged[pos[a.to]] += a.prob;
          }
        }
        for (const auto& [t, p] : merged) rows[i].push_back({t, p});
      }
    }
    // Recurrent classes inside the inner region never reach the target.
    std::vector<std::vector<int>> adj(k);
    for (int i = 0; i < k; ++i) {
      for (const auto& [t, p] : rows[i]) adj[i].push_back(t);
    }
    std::vector<char> zero(k, 0);
    for (const auto& comp : strongly_connected_components(adj)) {
      std::vector<char> inside(k, 0);
      for (int s : comp) inside[s] = 1;
      bool closed = true;
      for (int s : comp) {
        if (!hit[s].is_zero()) closed = false;
        for (const auto& [t, p] : rows[s]) {
          if (!inside[t]) closed = false;
        }
      }
      bool looping = comp.size() > 1;
      if (!looping) {
        for (int t : adj[comp[0]]) looping |= (t == comp[0]);
      }
      if (closed && looping) {
        for (int s : comp) zero[s] = 1;
      }
    }
    // Remaining states: (I - P) x = hit + P(. , zero)*0, solved exactly.
    std::vector<int> solve_states;
    for (int i = 0; i < k; ++i) {
      if (!zero[i]) solve_states.push_back(i);
    }
    if (!solve_states.empty()) {
      const int kk = static_cast<int>(solve_states.size());
      std::vector<int> spos(k, -1);
      for (int i = 0; i < kk; ++i) spos[solve_states[i]] = i;
      Mat a(kk, Vec(kk, Rational(0)));
      Vec b(kk, Rational(0));
      for (int i = 0; i < kk; ++i) {
        const int s = solve_states[i];
        a[i][i] = Rational(1);
        b[i] = hit[s];
        for (const auto& [t, p] : rows[s]) {
          if (spos[t] >= 0) a[i][spos[t]] -= p;
        }
      }
      Vec xs = solve_linear(std::move(a), std::move(b));
      for (int i = 0; i < kk; ++i) x[inner[solve_states[i]]] = xs[i];
    }
    return x;
  };

  Vec x;
  const int max_rounds = 100000;
  for (int round = 0;; ++round) {
    if (round > max_rounds) throw InternalError("max_reach: policy iteration diverged");
    x = evaluate();
    bool improved = false;
    for (int s : component.states) {
      if (m.states[s].owner != 1 || in_t[s]) continue;
      const int cur = sol.strategy.action[s];
      int best = cur;
      Rational bestx = x[m.states[s].actions[cur].to];
      for (int aid : choices[s]) {
        Rational cand = x[m.states[s].actions[aid].to];
        if (cand > bestx) {
          bestx = cand;
          best = aid;
        }
      }
      if (best != cur && bestx > x[m.states[s].actions[cur].to]) {
        sol.strategy.action[s] = best;
        improved = true;
      }
    }
    if (!improved) break;
  }
  sol.value = x;

  // Sanity: value-zero iff unreachable, and the value-one set must be the
  // almost-sure fixpoint.
  auto sure = almost_sure_reach(m, component.states, targets);
  std::vector<char> in_sure(n, 0);
  for (int s : sure) in_sure[s] = 1;
  for (int s : component.states) {
    if (!can_reach[s] && !sol.value[s].is_zero()) {
      throw InternalError("max_reach: positive value without a path");
    }
    const bool one = (sol.value[s] == Rational(1));
    if (one != static_cast<bool>(in_sure[s])) {
      throw InternalError("max_reach: value-one set disagrees with the almost-sure fixpoint");
    }
  }
  return sol;
}

}  // namespace pmdp
