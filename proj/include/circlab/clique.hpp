#pragma once

#include <cstdint>
#include <vector>

namespace circlab {

// Bitset graph on at most 64 vertices; adjacency[v] has bit u set iff {u, v}
// is an edge.
using VertexMask = std::uint64_t;

struct CliqueResult {
  int size = 0;
  VertexMask members = 0;
  std::uint64_t nodes = 0;  // search-tree nodes visited
};

// Largest clique K with required ⊆ K ⊆ required ∪ candidates, searched only
// if it can beat `at_least - 1` (smaller cliques are not reported: size stays
// 0). Stops as soon as a clique of size `cap` is found. Every vertex in
// `candidates` must be adjacent to every vertex in `required`.
//
// Branch and bound: vertices are tried by decreasing degree inside the
// candidate set (ties by index); branches whose size plus remaining
// candidates cannot reach the target are cut, and candidates whose degree is
// too low to lie in a large enough clique are peeled first.
CliqueResult max_clique_capped(const std::vector<VertexMask>& adjacency,
                               VertexMask required, VertexMask candidates,
                               int at_least, int cap);

std::vector<int> mask_to_vertices(VertexMask mask);

}  // namespace circlab
