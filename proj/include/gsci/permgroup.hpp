#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "gsci/bits.hpp"
#include "gsci/graphs.hpp"
#include "gsci/numeric.hpp"

namespace gsci {

using Point = std::uint8_t;
using Color = std::uint8_t;

// Bijection on 0..degree-1; (a * b)(i) = a(b(i)).
class Permutation {
 public:
  Permutation() : Permutation(0) {}
  explicit Permutation(int degree);
  explicit Permutation(std::span<const int> images);
  static Permutation from_cycles(int degree, std::initializer_list<std::initializer_list<int>> cycles);
  static Permutation transposition(int degree, int a, int b);

  int degree() const { return n_; }
  int operator()(int i) const { return img_[i]; }
  const Point* data() const { return img_.data(); }
  Point* mutable_data() { return img_.data(); }
  Permutation operator*(const Permutation& rhs) const;
  Permutation inverse() const;
  bool is_identity() const;
  int first_moved() const;  // degree() when identity
  // Image of a vertex subset.
  VertexMask apply(VertexMask m) const;
  Permutation restricted(int k) const;  // requires {0..k-1} to be invariant
  std::string cycles() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::array<Point, kMaxVertices> img_;
  int n_;
};

// Stabilizer chain for the standard base 0, 1, ..., degree-1.
class StrongGeneratingSystem {
 public:
  struct Level {
    std::vector<Point> orbit;               // orbit[0] is the base point itself
    std::vector<Permutation> transversal;   // transversal[j](base) = orbit[j]
    std::vector<Permutation> inverse;
    std::array<std::int16_t, kMaxVertices> index;  // point -> position in orbit, or -1
  };

  StrongGeneratingSystem() = default;
  int degree() const { return n_; }
  const std::vector<Permutation>& generators() const { return gens_; }
  const Level& level(int i) const { return levels_[i]; }
  BigInt order() const { return order_of_prefix(n_); }
  BigInt order_of_prefix(int m) const;
  bool contains(const Permutation& g) const;
  // Action on the invariant prefix {0..k-1}.
  StrongGeneratingSystem restricted(int k) const;

  template <class F>
  void for_each_element(F&& f) const {
    Permutation g(n_);
    enumerate(0, g, f);
  }

  friend StrongGeneratingSystem schreier_sims(int degree, std::span<const Permutation> generators);

 private:
  template <class F>
  void enumerate(int i, const Permutation& g, F& f) const {
    if (i == n_) {
      f(g);
      return;
    }
    for (const auto& t : levels_[i].transversal) enumerate(i + 1, g * t, f);
  }
  void rebuild_level(int i);
  Permutation strip(Permutation h, int from, int& failed_level) const;

  int n_ = 0;
  std::vector<Permutation> gens_;
  std::vector<Level> levels_;
};

StrongGeneratingSystem schreier_sims(int degree, std::span<const Permutation> generators);

struct ColoredGraphAut {
  std::vector<Permutation> generators;  // degree n
  BigInt order;
  StrongGeneratingSystem full;  // degree n
  StrongGeneratingSystem sgs;   // restricted to the system vertices
};

ColoredGraphAut automorphism_group(const CodeGraph& g);
// Variant without connectivity requirements; vertices below k_sys form one color class.
ColoredGraphAut automorphism_group(std::span<const VertexMask> adj, int k_sys);

std::vector<int> orbit_of_point(std::span<const Permutation> gens, int point);
std::vector<std::vector<Color>> orbit_of_coloring(std::span<const Permutation> gens, std::span<const Color> coloring);

// Canonical labeling of a two-colored graph (system vertices first).
struct CanonicalGraph {
  int k_sys = 0;
  std::vector<VertexMask> adjacency;
  std::vector<int> labeling;  // labeling[v] = canonical label of input vertex v
  std::string key() const;
  friend bool operator==(const CanonicalGraph& a, const CanonicalGraph& b) {
    return a.k_sys == b.k_sys && a.adjacency == b.adjacency;
  }
};

CanonicalGraph canonical_graph(std::span<const VertexMask> adj, int k_sys);
bool isomorphic(const CodeGraph& a, const CodeGraph& b);

// Lexicographically maximal orbit representatives (position 0 most significant)
// under a group given by its stabilizer chain.
class LexCanonizer {
 public:
  template <class Count, bool kTrack>
  struct Candidate;
  template <class Count>
  struct Workspace;

  explicit LexCanonizer(const StrongGeneratingSystem& sgs);

  int degree() const { return n_; }
  const BigInt& group_order() const { return order_; }
  // True when group order and all stabilizer counts fit in 64 bits.
  bool small_group() const { return small_; }
  // Point sets Q with Sym(Q) contained in the group.
  const std::vector<std::vector<int>>& symmetric_classes() const { return classes_; }
  // Largest position before i in i's symmetric class, or -1.
  int previous_in_class(int i) const { return prev_in_class_[i]; }

  struct Image {
    std::vector<Color> coloring;
    BigInt stabilizer_order;
    Permutation certificate;  // coloring[j] = input[certificate(j)]
  };
  Image canonical_image(std::span<const Color> coloring) const;
  bool is_canonical(std::span<const Color> coloring) const;
  BigInt stabilizer_order(std::span<const Color> coloring) const;
  BigInt orbit_size(std::span<const Color> coloring) const;

  // Hot paths. The coloring must already be sorted descending inside each
  // symmetric class; on success `stab` receives |Stab(coloring)|.
  bool is_canonical_sorted(const Color* coloring, std::uint64_t& stab, Workspace<std::uint64_t>& ws) const;
  bool is_canonical_sorted(const Color* coloring, BigInt& stab, Workspace<BigInt>& ws) const;
  bool sorted_in_classes(const Color* coloring) const;

 private:
  struct LevelData {
    std::vector<Point> orbit;
    std::vector<std::vector<Point>> perms;  // transversal images, full degree
    std::vector<int> cls;                   // symmetric class of each orbit point or -1
    std::vector<std::uint64_t> moved;       // classes touched above the base point
  };

  template <class Count, bool kTrack>
  bool search(const Color* input, bool test_mode, Workspace<Count>* ws, Count& stab, Color* image,
              Permutation* cert) const;
  template <class Count, bool kTrack>
  void sort_classes(Candidate<Count, kTrack>& c, std::uint64_t mask, int from_level) const;

  int n_;
  BigInt order_;
  bool small_;
  std::vector<std::vector<int>> classes_;
  std::vector<int> class_of_;
  std::vector<int> prev_in_class_;
  // class_pos_[i][c]: positions > i - 1 of class c, ascending (i = 0..n)
  std::vector<std::vector<std::vector<Point>>> class_pos_;
  std::vector<LevelData> levels_;
};

template <class Count, bool kTrack>
struct LexCanonizer::Candidate {
  std::array<Color, kMaxVertices> w;
  Count count;
  std::uint64_t hash;
  Permutation g;  // maintained only when kTrack
};

template <class Count>
struct LexCanonizer::Workspace {
  std::vector<Candidate<Count, false>> cur, next;
};

}  // namespace gsci
