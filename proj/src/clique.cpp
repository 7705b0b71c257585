#include "circlab/clique.hpp"

#include <algorithm>
#include <bit>

namespace circlab {
namespace {

struct Search {
  const std::vector<VertexMask>& adj;
  std::vector<int> order;
  int cap;
  int best_size;
  VertexMask best = 0;
  std::uint64_t nodes = 0;
  bool done = false;

  void expand(VertexMask clique, int size, VertexMask cands) {
    ++nodes;
    if (size > best_size) {
      best_size = size;
      best = clique;
      if (size >= cap) {
        done = true;
        return;
      }
    }
    for (int v : order) {
      if (done) return;
      if (size + std::popcount(cands) <= best_size) return;
      const VertexMask bit = VertexMask{1} << v;
      if (!(cands & bit)) continue;
      expand(clique | bit, size + 1, cands & adj[static_cast<std::size_t>(v)]);
      cands &= ~bit;
    }
  }
};

}  // namespace

std::vector<int> mask_to_vertices(VertexMask mask) {
  std::vector<int> out;
  while (mask) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

CliqueResult max_clique_capped(const std::vector<VertexMask>& adjacency,
                               VertexMask required, VertexMask candidates,
                               int at_least, int cap) {
  const int base = std::popcount(required);
  candidates &= ~required;
  // Peel candidates that cannot belong to a clique of size at_least.
  const int need = at_least - base - 1;  // neighbours needed among candidates
  bool changed = true;
  while (changed && need > 0) {
    changed = false;
    for (VertexMask m = candidates; m; m &= m - 1) {
      const int v = std::countr_zero(m);
      if (std::popcount(adjacency[static_cast<std::size_t>(v)] & candidates) < need) {
        candidates &= ~(VertexMask{1} << v);
        changed = true;
      }
    }
  }
  if (base + std::popcount(candidates) < at_least) return {};

  Search s{adjacency, mask_to_vertices(candidates), cap, at_least - 1};
  std::stable_sort(s.order.begin(), s.order.end(), [&](int a, int b) {
    return std::popcount(adjacency[static_cast<std::size_t>(a)] & candidates) >
           std::popcount(adjacency[static_cast<std::size_t>(b)] & candidates);
  });
  s.expand(required, base, candidates);
  if (s.best_size < at_least) return {0, 0, s.nodes};
  return {s.best_size, s.best, s.nodes};
}

}  // namespace circlab
