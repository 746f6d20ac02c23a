#include "pmdp/decomposition.hpp"

#include <algorithm>

#include "pmdp/errors.hpp"

namespace pmdp {

bool EndComponent::contains(int s) const {
  return std::binary_search(states.begin(), states.end(), s);
}

std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;

  // Explicit DFS stack: (state, next edge position).
  std::vector<std::pair<int, std::size_t>> dfs;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    dfs.push_back({root, 0});
    while (!dfs.empty()) {
      auto& [v, ei] = dfs.back();
      if (ei == 0) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (ei < adj[v].size()) {
        const int w = adj[v][ei++];
        if (index[w] == -1) {
          dfs.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        std::vector<int> comp;
        while (true) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
          if (w == v) break;
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
      const int finished = v;
      dfs.pop_back();
      if (!dfs.empty()) {
        low[dfs.back().first] = std::min(low[dfs.back().first], low[finished]);
      }
    }
  }
  return out;
}

namespace {

// Step graph over original ids, restricted to `active`.
std::vector<std::vector<int>> step_graph(const ParityMDP& m, const std::vector<char>& active) {
  std::vector<std::vector<int>> adj(m.size());
  for (int s = 0; s < m.size(); ++s) {
    if (!active[s]) continue;
    for (const Action& a : m.states[s].actions) {
      if (!active[a.to]) continue;
      if (m.states[s].owner == 2 && a.prob.sign() <= 0) continue;
      adj[s].push_back(a.to);
    }
  }
  return adj;
}

std::vector<char> as_mask(int n, const std::vector<int>* domain) {
  std::vector<char> mask(n, domain == nullptr ? 1 : 0);
  if (domain) {
    for (int s : *domain) {
      if (s >= 0 && s < n) mask[s] = 1;
    }
  }
  return mask;
}

// SCCs of the step graph restricted to `active`, skipping inactive states.
// Inactive states show up as isolated singletons in the full-size graph;
// drop them from the result.
std::vector<std::vector<int>> masked_sccs(const ParityMDP& m, const std::vector<char>& active) {
  auto adj = step_graph(m, active);
  auto comps = strongly_connected_components(adj);
  std::vector<std::vector<int>> out;
  for (auto& c : comps) {
    if (!active[c[0]]) continue;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> sccs(const ParityMDP& m, const std::vector<int>* domain) {
  return masked_sccs(m, as_mask(m.size(), domain));
}

bool is_end_component(const ParityMDP& m, const std::vector<int>& states) {
  if (states.empty()) return false;
  std::vector<char> in(m.size(), 0);
  for (int s : states) {
    if (s < 0 || s >= m.size()) return false;
    in[s] = 1;
  }
  for (int s : states) {
    const State& st = m.states[s];
    if (st.owner == 1) {
      bool stays = false;
      for (const Action& a : st.actions) {
        if (in[a.to]) stays = true;
      }
      if (!stays) return false;
    } else {
      for (const Action& a : st.actions) {
        if (a.prob.sign() > 0 && !in[a.to]) return false;
      }
    }
  }
  // Strong connectivity through internal edges, including the one-state
  // case, which needs a self-loop.
  auto adj = step_graph(m, in);
  auto comps = strongly_connected_components(adj);
  std::vector<int> sorted = states;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& c : comps) {
    if (c.size() == sorted.size() && c == sorted) {
      if (sorted.size() > 1) return true;
      for (int t : adj[sorted[0]]) {
        if (t == sorted[0]) return true;
      }
      return false;
    }
  }
  return false;
}

std::vector<EndComponent> max_end_components(const ParityMDP& m,
                                             const std::vector<int>* domain) {
  std::vector<EndComponent> out;
  std::vector<std::vector<int>> work;
  {
    auto mask = as_mask(m.size(), domain);
    std::vector<int> all;
    for (int s = 0; s < m.size(); ++s) {
      if (mask[s]) all.push_back(s);
    }
    if (!all.empty()) work.push_back(std::move(all));
  }

  while (!work.empty()) {
    std::vector<int> u = std::move(work.back());
    work.pop_back();
    if (u.empty()) continue;
    std::vector<char> active(m.size(), 0);
    for (int s : u) active[s] = 1;
    auto comps = masked_sccs(m, active);

    // Bad states break their SCC's closure: an environment state with a
    // positive-probability edge leaving the SCC, or a system state with no
    // action staying in it. A transient singleton (no self-loop) is bad by
    // the same test. No end component inside u contains a bad state, nor any
    // state of the bad set's environment attractor; SCCs without bad states
    // never intersect that attractor, so they are exactly the maximal end
    // components of their region.
    std::vector<int> bad;
    std::vector<EndComponent> clean;
    std::vector<char> in_scc(m.size(), 0);
    for (const auto& scc : comps) {
      for (int s : scc) in_scc[s] = 1;
      bool any_bad = false;
      for (int s : scc) {
        const State& st = m.states[s];
        if (st.owner == 1) {
          bool stays = false;
          for (const Action& a : st.actions) {
            if (in_scc[a.to]) stays = true;
          }
          if (!stays) {
            bad.push_back(s);
            any_bad = true;
          }
        } else {
          for (const Action& a : st.actions) {
            if (a.prob.sign() > 0 && !in_scc[a.to]) {
              bad.push_back(s);
              any_bad = true;
              break;
            }
          }
        }
      }
      for (int s : scc) in_scc[s] = 0;
      if (!any_bad) clean.push_back(EndComponent{scc});
    }

    if (!bad.empty()) {
      auto attr = env_attractor(m, bad, &u);
      std::vector<char> removed(m.size(), 0);
      for (int s : attr) removed[s] = 1;
      std::vector<char> emitted(m.size(), 0);
      for (const auto& ec : clean) {
        for (int s : ec.states) emitted[s] = 1;
      }
      std::vector<int> rest;
      for (int s : u) {
        if (!removed[s] && !emitted[s]) rest.push_back(s);
      }
      if (!rest.empty()) work.push_back(std::move(rest));
    }
    for (auto& ec : clean) out.push_back(std::move(ec));
  }

  std::sort(out.begin(), out.end(), [](const EndComponent& a, const EndComponent& b) {
    return a.states.front() < b.states.front();
  });
  return out;
}

std::vector<EndComponent> max_gecs(const ParityMDP& m, const std::vector<int>* domain) {
  std::vector<EndComponent> out;
  std::vector<std::vector<int>> work;
  {
    auto mask = as_mask(m.size(), domain);
    std::vector<int> all;
    for (int s = 0; s < m.size(); ++s) {
      if (mask[s]) all.push_back(s);
    }
    if (!all.empty()) work.push_back(std::move(all));
  }

  while (!work.empty()) {
    std::vector<int> u = std::move(work.back());
    work.pop_back();
    for (auto& ec : max_end_components(m, &u)) {
      int top = 0;
      for (int s : ec.states) top = std::max(top, m.states[s].rank);
      if (top % 2 == 0) {
        out.push_back(std::move(ec));
        continue;
      }
      std::vector<int> top_states;
      for (int s : ec.states) {
        if (m.states[s].rank == top) top_states.push_back(s);
      }
      auto attr = env_attractor(m, top_states, &ec.states);
      std::vector<char> removed(m.size(), 0);
      for (int s : attr) removed[s] = 1;
      std::vector<int> rest;
      for (int s : ec.states) {
        if (!removed[s]) rest.push_back(s);
      }
      if (!rest.empty()) work.push_back(std::move(rest));
    }
  }

  std::sort(out.begin(), out.end(), [](const EndComponent& a, const EndComponent& b) {
    return a.states.front() < b.states.front();
  });
  return out;
}

}  // namespace pmdp
