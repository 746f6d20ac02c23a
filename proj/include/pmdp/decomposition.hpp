#pragma once

#include <vector>

#include "pmdp/arena.hpp"

namespace pmdp {

// An end component: a set of states (sorted ids) closed in the MDP reading
// (every environment state keeps all its positive-probability edges inside,
// every system state has some action inside) and strongly connected through
// those edges.
struct EndComponent {
  std::vector<int> states;

  bool contains(int s) const;
};

// Strongly connected components of a directed graph given as adjacency
// lists, in reverse topological order (components without outgoing edges to
// later components come first). Tarjan's algorithm, iterative.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adj);

// SCCs of the arena's step graph (system: all actions, environment: the
// positive-probability edges), within `domain` (nullptr = all states).
// Reverse topological order; members sorted.
std::vector<std::vector<int>> sccs(const ParityMDP& m, const std::vector<int>* domain = nullptr);

// True when `states` is an end component of m (within the full arena).
bool is_end_component(const ParityMDP& m, const std::vector<int>& states);

// Maximal end components within `domain`. They are pairwise disjoint and
// every end component inside the domain is contained in one of them.
// Sorted by smallest member id.
//
// Iterative SCC pruning: states that break the closure conditions of their
// SCC ("bad": an environment state with a positive-probability edge leaving
// the SCC, a system state with no action staying in it) are removed together
// with their environment attractor, which no end component can intersect,
// and the remainder is decomposed again.
std::vector<EndComponent> max_end_components(const ParityMDP& m,
                                             const std::vector<int>* domain = nullptr);

// Maximal good end components within `domain`: inclusion-maximal end
// components whose highest rank is even. Sorted by smallest member id.
// Found by repeatedly splitting maximal end components whose top rank is
// odd: the environment attractor (within the component) of its top-rank
// states is removed, and the remainder re-decomposed.
std::vector<EndComponent> max_gecs(const ParityMDP& m, const std::vector<int>* domain = nullptr);

}  // namespace pmdp
