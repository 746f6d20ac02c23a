#include "pmdp/arena.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pmdp/errors.hpp"

namespace pmdp {

int ParityMDP::max_rank() const {
  int r = 0;
  for (const auto& s : states) r = std::max(r, s.rank);
  return r;
}

Rational ParityMDP::max_cost() const {
  Rational w(0);
  for (const auto& s : states) w = std::max(w, s.cost);
  return w;
}

std::optional<int> ParityMDP::state_by_name(const std::string& name) const {
  for (const auto& s : states) {
    if (s.name == name) return s.id;
  }
  return std::nullopt;
}

std::vector<Diagnostic> validate(const ParityMDP& m) {
  std::vector<Diagnostic> out;
  const int n = m.size();
  if (n == 0) {
    out.push_back({-1, "arena has no states"});
    return out;
  }
  if (m.initial < 0 || m.initial >= n) {
    out.push_back({-1, "initial state id out of range"});
  }
  for (int i = 0; i < n; ++i) {
    const State& s = m.states[i];
    if (s.id != i) {
      out.push_back({i, "state ids must be dense and in order"});
      continue;
    }
    if (s.owner != 1 && s.owner != 2) out.push_back({i, "owner must be 1 or 2"});
    if (s.rank < 0) out.push_back({i, "rank must be nonnegative"});
    if (s.cost.sign() < 0) out.push_back({i, "cost must be nonnegative"});
    if (s.actions.empty()) out.push_back({i, "state has no action"});
    std::set<std::string> names;
    Rational mass(0);
    for (const Action& a : s.actions) {
      if (!names.insert(a.name).second) {
        out.push_back({i, "duplicate action name \"" + a.name + "\""});
      }
      if (a.to < 0 || a.to >= n) {
        out.push_back({i, "action \"" + a.name + "\" targets unknown state"});
      }
      if (s.owner == 2) {
        if (a.prob.sign() < 0) {
          out.push_back({i, "action \"" + a.name + "\" has negative probability"});
        }
        mass += a.prob;
      }
    }
    if (s.owner == 2 && !s.actions.empty() && mass != Rational(1)) {
      out.push_back({i, "environment action probabilities sum to " + mass.str() + ", want 1"});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.state < b.state; });
  return out;
}

void require_valid(const ParityMDP& m) {
  auto diags = validate(m);
  if (diags.empty()) return;
  std::string msg;
  for (const auto& d : diags) {
    if (!msg.empty()) msg += "; ";
    if (d.state >= 0) msg += "state " + std::to_string(d.state) + ": ";
    msg += d.message;
  }
  throw DomainError("InvalidArena", msg);
}

ParityMDP restrict_arena(const ParityMDP& m, const std::vector<int>& keep, int entry) {
  std::vector<int> ids = keep;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<int> newid(m.size(), -1);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= m.size()) {
      throw DomainError("UnknownState", "restriction refers to state " + std::to_string(ids[i]));
    }
    newid[ids[i]] = static_cast<int>(i);
  }

  ParityMDP out;
  out.states.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const State& s = m.states[ids[i]];
    State t;
    t.id = static_cast<int>(i);
    t.name = s.name;
    t.owner = s.owner;
    t.rank = s.rank;
    t.cost = s.cost;
    Rational mass(0);
    for (const Action& a : s.actions) {
      if (newid[a.to] < 0) {
        if (s.owner == 2 && a.prob.sign() > 0) {
          throw DomainError("InvalidRestriction",
                            "environment state " + s.name +
                                " keeps positive probability of leaving the subset");
        }
        continue;  // dropped: system action or zero-probability edge out of the subset
      }
      Action b = a;
      b.id = static_cast<int>(t.actions.size());
      b.to = newid[a.to];
      t.actions.push_back(b);
      if (s.owner == 2) mass += a.prob;
    }
    if (t.actions.empty()) {
      throw DomainError("InvalidRestriction",
                        "state " + s.name + " has no action inside the subset");
    }
    if (s.owner == 2 && mass != Rational(1)) {
      throw DomainError("InvalidRestriction",
                        "environment state " + s.name + " loses probability mass");
    }
    out.states.push_back(std::move(t));
  }
  out.source_ids = ids;

  if (entry >= 0) {
    if (entry >= m.size() || newid[entry] < 0) {
      throw DomainError("UnknownState", "entry state not inside the subset");
    }
    out.initial = newid[entry];
  } else if (m.initial < m.size() && newid[m.initial] >= 0) {
    out.initial = newid[m.initial];
  } else {
    out.initial = 0;
  }
  return out;
}

namespace {

// Shared counting fixpoint for both attractor flavors.
//
// forcing = 2: environment forces (environment joins on SOME positive edge
// in, system joins when ALL its in-domain actions lead in).
// forcing = 1: system forces (system joins on SOME in-domain action in,
// environment joins when ALL its positive-probability in-domain actions
// lead in).
std::vector<int> attractor(const ParityMDP& m, const std::vector<int>& target,
                           const std::vector<int>* domain, int forcing) {
  const int n = m.size();
  std::vector<char> in_dom(n, domain == nullptr ? 1 : 0);
  if (domain) {
    for (int s : *domain) {
      if (s >= 0 && s < n) in_dom[s] = 1;
    }
  }

  // Relevant edges: for environment states only positive-probability ones,
  // for system states all in-domain actions. The "ALL" side joins when every
  // relevant edge is known to enter the attractor (counted down in `need`);
  // a state with no relevant edge never joins through the ALL rule.
  std::vector<int> need(n, 0);
  std::vector<std::vector<int>> preds(n);
  for (int s = 0; s < n; ++s) {
    if (!in_dom[s]) continue;
    for (const Action& a : m.states[s].actions) {
      if (!in_dom[a.to]) continue;
      if (m.states[s].owner == 2 && a.prob.sign() <= 0) continue;
      ++need[s];
      preds[a.to].push_back(s);
    }
  }

  std::vector<char> in_attr(n, 0);
  std::vector<int> queue;
  auto push = [&](int s) {
    if (!in_attr[s] && in_dom[s]) {
      in_attr[s] = 1;
      queue.push_back(s);
    }
  };
  for (int s : target) {
    if (s >= 0 && s < n) push(s);
  }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int t = queue[qi];
    for (int from : preds[t]) {
      if (in_attr[from]) continue;
      if (m.states[from].owner == forcing) {
        push(from);
      } else if (--need[from] == 0) {
        push(from);
      }
    }
  }

  std::vector<int> out;
  for (int s = 0; s < n; ++s) {
    if (in_attr[s]) out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<int> env_attractor(const ParityMDP& m, const std::vector<int>& target,
                               const std::vector<int>* domain) {
  return attractor(m, target, domain, 2);
}

std::vector<int> sys_attractor(const ParityMDP& m, const std::vector<int>& target,
                               const std::vector<int>* domain) {
  return attractor(m, target, domain, 1);
}

ParityMDP project_mdp(const ParityMDP& m) {
  ParityMDP out = m;
  for (State& s : out.states) s.rank = 0;
  return out;
}

}  // namespace pmdp
