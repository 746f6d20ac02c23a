#include "pmdp/surecost.hpp"

#include <algorithm>
#include <set>

#include "pmdp/errors.hpp"
#include "pmdp/games.hpp"

namespace pmdp {

PrunedArena prune_to_sure_winning(const ParityMDP& m) {
  PrunedArena out;
  auto sol = solve_parity(project_game(m));
  out.winning = sol.w1;
  out.parity_strategy = sol.strategy1;
  std::vector<char> win(m.size(), 0);
  for (int s : out.winning) win[s] = 1;
  for (int s = 0; s < m.size(); ++s) {
    if (!win[s]) out.pruned.push_back(s);
  }
  out.realizable = m.size() > 0 && win[m.initial];
  if (!out.winning.empty()) {
    const int entry = out.realizable ? m.initial : out.winning.front();
    out.arena = restrict_arena(m, out.winning, entry);
  }
  return out;
}

namespace {

std::vector<int> set_difference_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Shared tail of both pipelines: given the retained components, build the
// cost table of the reduced MDP over the winning region and solve it.
SureCostResult assemble(const ParityMDP& m, PrunedArena pr,
                        std::vector<EndComponent> components) {
  SureCostResult r;
  r.realizable = pr.realizable;
  r.winning = std::move(pr.winning);
  r.pruned = std::move(pr.pruned);
  r.parity_strategy = std::move(pr.parity_strategy);

  const Rational high = m.max_cost() + Rational(1);
  r.reduced_cost.assign(m.size(), high);
  for (auto& c : components) {
    const Rational v = ec_value(m, c);
    for (int s : c.states) r.reduced_cost[s] = v;
    r.components.push_back({std::move(c), v});
  }

  if (!r.winning.empty()) {
    r.mprime = min_mean_payoff(m, &r.winning, &r.reduced_cost);
    r.reduced = restrict_arena(m, r.winning, r.realizable ? m.initial : r.winning.front());
    r.reduced_source = r.reduced.source_ids;
    for (State& st : r.reduced.states) {
      st.rank = 0;
      st.cost = r.reduced_cost[r.reduced_source[st.id]];
    }
  }
  if (r.realizable) r.value = r.mprime.gain[m.initial];
  return r;
}

}  // namespace

SureCostResult cost_sure_infinite(const ParityMDP& m) {
  require_valid(m);
  auto pr = prune_to_sure_winning(m);
  std::vector<EndComponent> comps;
  if (!pr.winning.empty()) comps = max_gecs(m, &pr.winning);
  return assemble(m, std::move(pr), std::move(comps));
}

std::vector<EndComponent> max_sgecs(const ParityMDP& m, const std::vector<int>* domain) {
  std::vector<int> all;
  if (domain == nullptr) {
    all.resize(m.size());
    for (int i = 0; i < m.size(); ++i) all[i] = i;
    domain = &all;
  }
  int max_rank = 0;
  for (int s : *domain) max_rank = std::max(max_rank, m.states[s].rank);

  std::vector<EndComponent> found;
  for (int k = -1; k <= max_rank; k += 2) {
    std::vector<std::vector<int>> work{*domain};
    while (!work.empty()) {
      std::vector<int> cand = std::move(work.back());
      work.pop_back();
      for (auto& c : max_end_components(m, &cand)) {
        std::vector<int> bad;
        for (int s : c.states) {
          if (m.states[s].rank % 2 == 1 && m.states[s].rank > k) bad.push_back(s);
        }
        if (bad.empty()) {
          auto sg = super_good_states(m, c);
          if (sg.is_sgec) {
            found.push_back(std::move(c));
            continue;
          }
          bad = set_difference_sorted(c.states, sg.super_good);
        }
        auto attr = env_attractor(m, bad, &c.states);
        auto rest = set_difference_sorted(c.states, attr);
        if (!rest.empty()) work.push_back(std::move(rest));
      }
    }
  }

  // Deduplicate, drop contained components, merge overlapping ones.
  std::set<std::vector<int>> uniq;
  for (auto& c : found) uniq.insert(std::move(c.states));
  std::vector<std::vector<int>> sets(uniq.begin(), uniq.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < sets.size() && !changed; ++i) {
      for (std::size_t j = 0; j < sets.size() && !changed; ++j) {
        if (i == j) continue;
        if (std::includes(sets[j].begin(), sets[j].end(), sets[i].begin(), sets[i].end())) {
          sets.erase(sets.begin() + static_cast<long>(i));
          changed = true;
          break;
        }
        std::vector<int> inter;
        std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                              std::back_inserter(inter));
        if (!inter.empty()) {
          // Overlap without containment: the union is again super-good;
          // verify that before trusting it.
          std::vector<int> uni;
          std::set_union(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                         std::back_inserter(uni));
          if (!super_good_states(m, EndComponent{uni}).is_sgec) {
            throw InternalError("max_sgecs: union of overlapping components is not super-good");
          }
          sets.erase(sets.begin() + static_cast<long>(std::max(i, j)));
          sets.erase(sets.begin() + static_cast<long>(std::min(i, j)));
          sets.push_back(std::move(uni));
          changed = true;
        }
      }
    }
  }

  std::sort(sets.begin(), sets.end());
  std::vector<EndComponent> out;
  for (auto& s : sets) out.push_back(EndComponent{std::move(s)});
  return out;
}

SureCostResult cost_sure_finite(const ParityMDP& m) {
  require_valid(m);
  auto pr = prune_to_sure_winning(m);
  std::vector<EndComponent> comps;
  if (!pr.winning.empty()) comps = max_sgecs(m, &pr.winning);
  return assemble(m, std::move(pr), std::move(comps));
}

}  // namespace pmdp
