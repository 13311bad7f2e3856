#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gsci/graphs.hpp"
#include "gsci/permgroup.hpp"
#include "gsci/scan.hpp"

namespace gsci::testing {

inline std::vector<VertexMask> random_adjacency(std::mt19937_64& rng, int n, double p = 0.5) {
  std::bernoulli_distribution edge(p);
  std::vector<VertexMask> adj(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (edge(rng)) {
        adj[i] |= bit(j);
        adj[j] |= bit(i);
      }
  return adj;
}

inline CodeGraph random_code(std::mt19937_64& rng, int n, int k, double p = 0.5) {
  for (;;) {
    auto adj = random_adjacency(rng, n, p);
    if (is_connected(adj)) return CodeGraph(k, std::move(adj));
  }
}

// Adjacency of g relabeled by perm (vertex v goes to perm[v]).
inline std::vector<VertexMask> permuted(std::span<const VertexMask> adj, std::span<const int> perm) {
  std::vector<VertexMask> out(adj.size(), 0);
  for (std::size_t v = 0; v < adj.size(); ++v)
    for (std::size_t w = 0; w < adj.size(); ++w)
      if (test_bit(adj[v], static_cast<int>(w))) out[perm[v]] |= bit(perm[w]);
  return out;
}

// All permutations preserving adjacency and mapping {0..k-1} onto itself.
inline std::vector<std::vector<int>> brute_force_automorphisms(std::span<const VertexMask> adj, int k) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (int v = 0; v < k && ok; ++v) ok = perm[v] < k;
    for (int v = 0; v < n && ok; ++v)
      for (int w = v + 1; w < n && ok; ++w) ok = test_bit(adj[v], w) == test_bit(adj[perm[v]], perm[w]);
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Every connected graph on n vertices with every choice of system set, one per colored isomorphism class.
inline std::vector<CodeGraph> all_small_codes(int n) {
  std::vector<CodeGraph> out;
  std::set<std::string> seen;
  for (const auto& adj : nonisomorphic_graphs(n)) {
    if (!is_connected(adj)) continue;
    for (VertexMask sys = 1; sys + 1 < (VertexMask{1} << n); ++sys) {
      std::vector<int> perm(n);
      int next = 0;
      for (int v = 0; v < n; ++v)
        if (test_bit(sys, v)) perm[v] = next++;
      const int k = next;
      for (int v = 0; v < n; ++v)
        if (!test_bit(sys, v)) perm[v] = next++;
      auto relabeled = permuted(adj, perm);
      if (seen.insert(canonical_graph(relabeled, k).key()).second) out.emplace_back(k, std::move(relabeled));
    }
  }
  return out;
}

inline PauliParams random_params(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  double a = e(rng) * 4, b = e(rng), c = e(rng), d = e(rng);
  double s = a + b + c + d;
  double p1 = b / s, p2 = c / s, p3 = d / s;
  return {1.0 - p1 - p2 - p3, p1, p2, p3};
}

inline RayDirection random_direction(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  double a = e(rng), b = e(rng), c = e(rng);
  double s = a + b + c;
  double d1 = a / s, d2 = b / s;
  return {d1, d2, 1.0 - d1 - d2};
}

inline std::vector<Permutation> elements(const StrongGeneratingSystem& sgs) {
  std::vector<Permutation> out;
  sgs.for_each_element([&](const Permutation& g) { out.push_back(g); });
  return out;
}

// Image of a coloring under g: position g(j) receives color c[j].
inline std::vector<Color> act(const Permutation& g, std::span<const Color> c) {
  std::vector<Color> out(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) out[g(static_cast<int>(j))] = c[j];
  return out;
}

inline std::vector<Color> brute_canonical(const std::vector<Permutation>& group, std::span<const Color> c) {
  std::vector<Color> best(c.begin(), c.end());
  for (const auto& g : group) best = std::max(best, act(g, c));
  return best;
}

inline std::vector<Color> random_coloring(std::mt19937_64& rng, int k, int colors) {
  std::vector<Color> c(static_cast<std::size_t>(k));
  for (auto& v : c) v = static_cast<Color>(rng() % colors);
  return c;
}

inline BigInt burnside(const StrongGeneratingSystem& sgs, int colors) {
  BigInt total = 0;
  sgs.for_each_element([&](const Permutation& g) {
    int cycles = 0;
    std::vector<bool> seen(g.degree());
    for (int i = 0; i < g.degree(); ++i) {
      if (seen[i]) continue;
      ++cycles;
      for (int j = i; !seen[j]; j = g(j)) seen[j] = true;
    }
    total += boost::multiprecision::pow(BigInt(colors), cycles);
  });
  return total / sgs.order();
}

}  // namespace gsci::testing
