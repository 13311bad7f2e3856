#include "gsci/permgroup.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <sstream>

#include "gsci/errors.hpp"

namespace gsci {

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(int degree) : n_(degree) {
  if (degree < 0 || degree > kMaxVertices) throw DomainError("permutation degree must lie in 0..64");
  for (int i = 0; i < kMaxVertices; ++i) img_[i] = static_cast<Point>(i);
}

Permutation::Permutation(std::span<const int> images) : Permutation(static_cast<int>(images.size())) {
  VertexMask seen = 0;
  for (int i = 0; i < n_; ++i) {
    int v = images[i];
    if (v < 0 || v >= n_ || test_bit(seen, v)) throw DomainError("permutation images are not a bijection");
    seen |= bit(v);
    img_[i] = static_cast<Point>(v);
  }
}

Permutation Permutation::from_cycles(int degree, std::initializer_list<std::initializer_list<int>> cycles) {
  std::vector<int> img(degree);
  std::iota(img.begin(), img.end(), 0);
  for (const auto& cyc : cycles) {
    std::vector<int> c(cyc);
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j] < 0 || c[j] >= degree) throw DomainError("cycle entry out of range");
      img[c[j]] = c[(j + 1) % c.size()];
    }
  }
  return Permutation(std::span<const int>(img));
}

Permutation Permutation::transposition(int degree, int a, int b) {
  Permutation p(degree);
  if (a < 0 || b < 0 || a >= degree || b >= degree) throw DomainError("transposition points out of range");
  std::swap(p.img_[a], p.img_[b]);
  return p;
}

Permutation Permutation::operator*(const Permutation& rhs) const {
  if (n_ != rhs.n_) throw DomainError("permutation degree mismatch");
  Permutation r(n_);
  for (int i = 0; i < n_; ++i) r.img_[i] = img_[rhs.img_[i]];
  return r;
}

Permutation Permutation::inverse() const {
  Permutation r(n_);
  for (int i = 0; i < n_; ++i) r.img_[img_[i]] = static_cast<Point>(i);
  return r;
}

bool Permutation::is_identity() const { return first_moved() == n_; }

int Permutation::first_moved() const {
  for (int i = 0; i < n_; ++i)
    if (img_[i] != i) return i;
  return n_;
}

VertexMask Permutation::apply(VertexMask m) const {
  VertexMask out = 0;
  for (; m != 0; m &= m - 1) out |= bit(img_[std::countr_zero(m)]);
  return out;
}

Permutation Permutation::restricted(int k) const {
  Permutation r(k);
  for (int i = 0; i < k; ++i) {
    if (img_[i] >= k) throw DomainError("restriction to a non-invariant prefix");
    r.img_[i] = img_[i];
  }
  return r;
}

std::string Permutation::cycles() const {
  std::ostringstream os;
  VertexMask done = 0;
  for (int i = 0; i < n_; ++i) {
    if (test_bit(done, i) || img_[i] == i) continue;
    os << '(';
    for (int j = i; !test_bit(done, j); j = img_[j]) {
      if (j != i) os << ' ';
      os << j;
      done |= bit(j);
    }
    os << ')';
  }
  std::string s = os.str();
  return s.empty() ? "()" : s;
}

// -------------------------------------------------------------- Schreier-Sims

void StrongGeneratingSystem::rebuild_level(int i) {
  Level& L = levels_[i];
  L.orbit.assign(1, static_cast<Point>(i));
  L.transversal.assign(1, Permutation(n_));
  L.inverse.assign(1, Permutation(n_));
  L.index.fill(-1);
  L.index[i] = 0;
  for (std::size_t head = 0; head < L.orbit.size(); ++head) {
    for (const auto& s : gens_) {
      if (s.first_moved() < i) continue;
      int img = s(L.orbit[head]);
      if (L.index[img] >= 0) continue;
      L.index[img] = static_cast<std::int16_t>(L.orbit.size());
      L.orbit.push_back(static_cast<Point>(img));
      L.transversal.push_back(s * L.transversal[head]);
      L.inverse.push_back(L.transversal.back().inverse());
    }
  }
}

Permutation StrongGeneratingSystem::strip(Permutation h, int from, int& failed_level) const {
  for (int l = from; l < n_; ++l) {
    int idx = levels_[l].index[h(l)];
    if (idx < 0) {
      failed_level = l;
      return h;
    }
    if (idx > 0) h = levels_[l].inverse[idx] * h;
  }
  failed_level = n_;
  return h;
}

StrongGeneratingSystem schreier_sims(int degree, std::span<const Permutation> generators) {
  StrongGeneratingSystem s;
  if (degree < 0 || degree > kMaxVertices) throw DomainError("group degree must lie in 0..64");
  s.n_ = degree;
  for (const auto& g : generators) {
    if (g.degree() != degree) throw DomainError("generator degree mismatch");
    if (!g.is_identity() && std::find(s.gens_.begin(), s.gens_.end(), g) == s.gens_.end()) s.gens_.push_back(g);
  }
  s.levels_.resize(degree);
  for (int i = 0; i < degree; ++i) s.rebuild_level(i);
  int i = degree - 1;
  while (i >= 0) {
    bool restarted = false;
    const auto& L = s.levels_[i];
    for (std::size_t j = 0; j < L.orbit.size() && !restarted; ++j) {
      for (std::size_t gi = 0; gi < s.gens_.size(); ++gi) {
        const Permutation& g = s.gens_[gi];
        if (g.first_moved() < i) continue;
        int img = g(L.orbit[j]);
        Permutation h = L.inverse[L.index[img]] * g * L.transversal[j];
        int failed = degree;
        Permutation r = s.strip(h, i + 1, failed);
        if (failed == degree) continue;
        s.gens_.push_back(r);
        for (int l = i + 1; l <= failed; ++l) s.rebuild_level(l);
        i = failed;
        restarted = true;
        break;
      }
    }
    if (!restarted) --i;
  }
  return s;
}

BigInt StrongGeneratingSystem::order_of_prefix(int m) const {
  BigInt r = 1;
  for (int i = 0; i < m && i < n_; ++i) r *= levels_[i].orbit.size();
  return r;
}

bool StrongGeneratingSystem::contains(const Permutation& g) const {
  if (g.degree() != n_) return false;
  int failed = 0;
  strip(g, 0, failed);
  return failed == n_;
}

StrongGeneratingSystem StrongGeneratingSystem::restricted(int k) const {
  if (k < 0 || k > n_) throw DomainError("restriction width out of range");
  StrongGeneratingSystem r;
  r.n_ = k;
  for (const auto& g : gens_) {
    Permutation p = g.restricted(k);
    if (!p.is_identity() && std::find(r.gens_.begin(), r.gens_.end(), p) == r.gens_.end()) r.gens_.push_back(p);
  }
  r.levels_.resize(k);
  for (int i = 0; i < k; ++i) {
    const Level& src = levels_[i];
    Level& dst = r.levels_[i];
    dst.orbit = src.orbit;
    dst.index.fill(-1);
    for (std::size_t j = 0; j < src.orbit.size(); ++j) {
      if (src.orbit[j] >= k) throw DomainError("restriction to a non-invariant prefix");
      dst.index[src.orbit[j]] = static_cast<std::int16_t>(j);
      dst.transversal.push_back(src.transversal[j].restricted(k));
      dst.inverse.push_back(dst.transversal.back().inverse());
    }
  }
  return r;
}

// ------------------------------------------------- partition refinement search

namespace {

using Cells = std::vector<VertexMask>;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

// Equitable refinement; returns a label-invariant trace of the splits performed.
std::uint64_t refine(std::span<const VertexMask> adj, Cells& cells) {
  std::uint64_t trace = cells.size();
  bool changed = true;
  int counts[kMaxVertices];
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < cells.size(); ++s) {
      const VertexMask splitter = cells[s];
      for (std::size_t c = 0; c < cells.size(); ++c) {
        VertexMask x = cells[c];
        if (std::popcount(x) == 1) continue;
        int lo = kMaxVertices, hi = -1;
        for (VertexMask r = x; r != 0; r &= r - 1) {
          int v = std::countr_zero(r);
          counts[v] = std::popcount(adj[v] & splitter);
          lo = std::min(lo, counts[v]);
          hi = std::max(hi, counts[v]);
        }
        if (lo == hi) continue;
        Cells parts;
        for (int val = lo; val <= hi; ++val) {
          VertexMask part = 0;
          for (VertexMask r = x; r != 0; r &= r - 1)
            if (counts[std::countr_zero(r)] == val) part |= bit(std::countr_zero(r));
          if (part != 0) {
            parts.push_back(part);
            trace = mix(trace, (s << 24) ^ (c << 16) ^ (static_cast<std::uint64_t>(val) << 8) ^ std::popcount(part));
          }
        }
        cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(c));
        cells.insert(cells.begin() + static_cast<std::ptrdiff_t>(c), parts.begin(), parts.end());
        c += parts.size() - 1;
        changed = true;
      }
    }
  }
  return trace;
}

void individualize(Cells& cells, int v) {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!test_bit(cells[c], v)) continue;
    if (std::popcount(cells[c]) == 1) return;
    cells[c] &= ~bit(v);
    cells.insert(cells.begin() + static_cast<std::ptrdiff_t>(c), bit(v));
    return;
  }
}

Cells initial_cells(int n, int k_sys) {
  Cells cells;
  if (k_sys > 0) cells.push_back(low_mask(k_sys));
  if (n > k_sys) cells.push_back(low_mask(n) & ~low_mask(k_sys));
  return cells;
}

bool same_shape(const Cells& a, const Cells& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t c = 0; c < a.size(); ++c)
    if (std::popcount(a[c]) != std::popcount(b[c])) return false;
  return true;
}

bool is_automorphism(std::span<const VertexMask> adj, const Permutation& g) {
  for (int u = 0; u < g.degree(); ++u)
    if (g.apply(adj[u]) != adj[g(u)]) return false;
  return true;
}

// Finds an automorphism mapping the discrete refinement of P onto that of Q.
bool find_isomorphism(std::span<const VertexMask> adj, const Cells& P, const Cells& Q, Permutation& out) {
  if (!same_shape(P, Q)) return false;
  const int n = static_cast<int>(adj.size());
  std::size_t target = P.size();
  for (std::size_t c = 0; c < P.size(); ++c)
    if (std::popcount(P[c]) > 1) {
      target = c;
      break;
    }
  if (target == P.size()) {
    std::vector<int> img(n);
    for (std::size_t c = 0; c < P.size(); ++c) img[std::countr_zero(P[c])] = std::countr_zero(Q[c]);
    Permutation g{std::span<const int>(img)};
    if (!is_automorphism(adj, g)) return false;
    out = g;
    return true;
  }
  const int v = std::countr_zero(P[target]);
  Cells P2 = P;
  individualize(P2, v);
  const std::uint64_t t1 = refine(adj, P2);
  for (VertexMask r = Q[target]; r != 0; r &= r - 1) {
    Cells Q2 = Q;
    individualize(Q2, std::countr_zero(r));
    if (refine(adj, Q2) != t1) continue;
    if (find_isomorphism(adj, P2, Q2, out)) return true;
  }
  return false;
}

VertexMask orbit_mask(std::span<const Permutation> gens, int point) {
  VertexMask orbit = bit(point);
  VertexMask frontier = orbit;
  while (frontier != 0) {
    VertexMask next = 0;
    for (VertexMask r = frontier; r != 0; r &= r - 1)
      for (const auto& g : gens) next |= bit(g(std::countr_zero(r)));
    frontier = next & ~orbit;
    orbit |= next;
  }
  return orbit;
}

}  // namespace

ColoredGraphAut automorphism_group(std::span<const VertexMask> adj, int k_sys) {
  const int n = static_cast<int>(adj.size());
  if (n < 1 || n > kMaxVertices || k_sys < 0 || k_sys > n) throw DomainError("automorphism_group: bad sizes");
  std::vector<Cells> chain(n + 1);
  chain[0] = initial_cells(n, k_sys);
  refine(adj, chain[0]);
  for (int i = 0; i < n; ++i) {
    chain[i + 1] = chain[i];
    individualize(chain[i + 1], i);
    refine(adj, chain[i + 1]);
  }
  std::vector<Permutation> gens;
  for (int i = n - 1; i >= 0; --i) {
    VertexMask cell = 0;
    for (VertexMask c : chain[i])
      if (test_bit(c, i)) cell = c;
    VertexMask orbit = orbit_mask(gens, i);
    const std::uint64_t t1 = [&] {
      Cells tmp = chain[i];
      individualize(tmp, i);
      return refine(adj, tmp);
    }();
    for (VertexMask r = cell & ~bit(i); r != 0; r &= r - 1) {
      const int j = std::countr_zero(r);
      if (test_bit(orbit, j)) continue;
      Cells Q = chain[i];
      individualize(Q, j);
      if (refine(adj, Q) != t1) continue;
      Permutation g;
      if (find_isomorphism(adj, chain[i + 1], Q, g)) {
        gens.push_back(g);
        orbit = orbit_mask(gens, i);
      }
    }
  }
  ColoredGraphAut out;
  out.generators = gens;
  out.full = schreier_sims(n, gens);
  out.order = out.full.order();
  out.sgs = out.full.restricted(k_sys);
  return out;
}

ColoredGraphAut automorphism_group(const CodeGraph& g) { return automorphism_group(g.adjacency(), g.k_sys()); }

std::vector<int> orbit_of_point(std::span<const Permutation> gens, int point) {
  std::vector<int> out;
  for (VertexMask r = orbit_mask(gens, point); r != 0; r &= r - 1) out.push_back(std::countr_zero(r));
  return out;
}

std::vector<std::vector<Color>> orbit_of_coloring(std::span<const Permutation> gens, std::span<const Color> coloring) {
  std::vector<std::vector<Color>> orbit{std::vector<Color>(coloring.begin(), coloring.end())};
  for (const auto& g : gens)
    if (g.degree() != static_cast<int>(coloring.size())) throw DomainError("coloring width does not match group degree");
  std::vector<std::vector<Color>> sorted = orbit;
  for (std::size_t head = 0; head < orbit.size(); ++head) {
    for (const auto& g : gens) {
      std::vector<Color> img(coloring.size());
      for (std::size_t j = 0; j < img.size(); ++j) img[j] = orbit[head][g(static_cast<int>(j))];
      auto it = std::lower_bound(sorted.begin(), sorted.end(), img);
      if (it != sorted.end() && *it == img) continue;
      sorted.insert(it, img);
      orbit.push_back(std::move(img));
    }
  }
  std::sort(orbit.begin(), orbit.end());
  return orbit;
}

// --------------------------------------------------------- canonical labeling

namespace {

struct LabelSearch {
  std::span<const VertexMask> adj;
  int n;
  bool have = false;
  std::vector<VertexMask> best;
  std::vector<int> best_labeling;

  void leaf(const Cells& cells) {
    std::vector<int> label(n);
    for (std::size_t c = 0; c < cells.size(); ++c) label[std::countr_zero(cells[c])] = static_cast<int>(c);
    std::vector<VertexMask> rel(n, 0);
    for (int v = 0; v < n; ++v)
      for (VertexMask r = adj[v]; r != 0; r &= r - 1) rel[label[v]] |= bit(label[std::countr_zero(r)]);
    if (!have || rel > best) {
      have = true;
      best = std::move(rel);
      best_labeling = std::move(label);
    }
  }

  void run(Cells cells) {
    refine(adj, cells);
    std::size_t target = cells.size();
    int size = kMaxVertices + 1;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      int s = std::popcount(cells[c]);
      if (s > 1 && s < size) {
        size = s;
        target = c;
      }
    }
    if (target == cells.size()) {
      leaf(cells);
      return;
    }
    std::vector<int> tried;
    for (VertexMask r = cells[target]; r != 0; r &= r - 1) {
      const int v = std::countr_zero(r);
      bool twin = false;
      for (int u : tried)
        if ((adj[u] & ~bit(v)) == (adj[v] & ~bit(u))) {
          twin = true;
          break;
        }
      if (twin) continue;
      tried.push_back(v);
      Cells next = cells;
      individualize(next, v);
      run(std::move(next));
    }
  }
};

}  // namespace

CanonicalGraph canonical_graph(std::span<const VertexMask> adj, int k_sys) {
  const int n = static_cast<int>(adj.size());
  if (n < 1 || n > kMaxVertices || k_sys < 0 || k_sys > n) throw DomainError("canonical_graph: bad sizes");
  LabelSearch s{adj, n};
  s.run(initial_cells(n, k_sys));
  CanonicalGraph out;
  out.k_sys = k_sys;
  out.adjacency = std::move(s.best);
  out.labeling = std::move(s.best_labeling);
  return out;
}

std::string CanonicalGraph::key() const {
  const int n = static_cast<int>(adjacency.size());
  std::string bits;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) bits.push_back(test_bit(adjacency[i], j) ? '1' : '0');
  while (bits.size() % 4) bits.push_back('0');
  std::string hex;
  for (std::size_t p = 0; p < bits.size(); p += 4) {
    int v = (bits[p] - '0') * 8 + (bits[p + 1] - '0') * 4 + (bits[p + 2] - '0') * 2 + (bits[p + 3] - '0');
    hex.push_back("0123456789abcdef"[v]);
  }
  return "k" + std::to_string(k_sys) + "n" + std::to_string(n) + ":" + hex;
}

bool isomorphic(const CodeGraph& a, const CodeGraph& b) {
  if (a.n() != b.n() || a.k_sys() != b.k_sys()) return false;
  return canonical_graph(a.adjacency(), a.k_sys()) == canonical_graph(b.adjacency(), b.k_sys());
}

// -------------------------------------------------------------- LexCanonizer

LexCanonizer::LexCanonizer(const StrongGeneratingSystem& sgs)
    : n_(sgs.degree()), order_(sgs.order()), small_(order_ < (BigInt(1) << 62)) {
  // symmetric classes: components of the relation "(a b) lies in the group"
  std::vector<int> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int a = 0; a < n_; ++a)
    for (int b = a + 1; b < n_; ++b) {
      if (find(a) == find(b)) continue;
      if (sgs.level(a).index[b] < 0) continue;  // b must lie in the orbit of a under G_a
      if (sgs.contains(Permutation::transposition(n_, a, b))) parent[find(b)] = find(a);
    }
  class_of_.assign(n_, -1);
  prev_in_class_.assign(n_, -1);
  std::vector<int> id_of_root(n_, -1);
  for (int v = 0; v < n_; ++v) {
    int r = find(v);
    bool nontrivial = false;
    for (int u = 0; u < n_; ++u)
      if (u != v && find(u) == r) nontrivial = true;
    if (!nontrivial) continue;
    if (id_of_root[r] < 0) {
      id_of_root[r] = static_cast<int>(classes_.size());
      classes_.emplace_back();
    }
    int c = id_of_root[r];
    if (!classes_[c].empty()) prev_in_class_[v] = classes_[c].back();
    classes_[c].push_back(v);
    class_of_[v] = c;
  }
  if (classes_.size() > 64) throw ConsistencyError("more than 64 symmetric classes");

  class_pos_.assign(n_ + 1, std::vector<std::vector<Point>>(classes_.size()));
  for (int i = 0; i <= n_; ++i)
    for (std::size_t c = 0; c < classes_.size(); ++c)
      for (int v : classes_[c])
        if (v >= i) class_pos_[i][c].push_back(static_cast<Point>(v));

  levels_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    const auto& L = sgs.level(i);
    LevelData& D = levels_[i];
    D.orbit = L.orbit;
    for (std::size_t j = 0; j < L.orbit.size(); ++j) {
      const Permutation& u = L.transversal[j];
      D.perms.emplace_back(u.data(), u.data() + n_);
      D.cls.push_back(class_of_[L.orbit[j]]);
      std::uint64_t moved = 0;
      for (int p = i + 1; p < n_; ++p)
        if (u(p) != p && class_of_[p] >= 0 && class_pos_[i + 1][class_of_[p]].size() > 1)
          moved |= std::uint64_t{1} << class_of_[p];
      D.moved.push_back(moved);
    }
  }
}

template <class Count, bool kTrack>
void LexCanonizer::sort_classes(Candidate<Count, kTrack>& c, std::uint64_t mask, int from_level) const {
  for (; mask != 0; mask &= mask - 1) {
    const auto& pos = class_pos_[from_level][std::countr_zero(mask)];
    for (std::size_t a = 1; a < pos.size(); ++a)
      for (std::size_t b = a; b > 0 && c.w[pos[b - 1]] < c.w[pos[b]]; --b) {
        std::swap(c.w[pos[b - 1]], c.w[pos[b]]);
        if constexpr (kTrack) std::swap(c.g.mutable_data()[pos[b - 1]], c.g.mutable_data()[pos[b]]);
      }
  }
}

namespace {

template <class C>
std::uint64_t hash_colors(const C& cand) {
  std::uint64_t words[kMaxVertices / 8];
  std::memcpy(words, cand.w.data(), sizeof words);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t w : words) h = (h ^ w) * 0x100000001b3ULL;
  return h;
}

template <class C>
void merge_into(std::vector<C>& next, C&& child) {
  child.hash = hash_colors(child);
  for (auto& e : next)
    if (e.hash == child.hash && e.w == child.w) {
      e.count += child.count;
      return;
    }
  next.push_back(std::move(child));
}

}  // namespace

template <class Count, bool kTrack>
bool LexCanonizer::search(const Color* input, bool test_mode, Workspace<Count>* ws, Count& stab, Color* image,
                          Permutation* cert) const {
  using Cand = Candidate<Count, kTrack>;
  std::vector<Cand> local_cur, local_next;
  std::vector<Cand>* curp = &local_cur;
  std::vector<Cand>* nextp = &local_next;
  if constexpr (!kTrack) {
    if (ws != nullptr) {
      curp = &ws->cur;
      nextp = &ws->next;
    }
  }
  std::vector<Cand>& cur0 = *curp;
  cur0.clear();
  {
    Cand c;
    c.w.fill(0);
    std::memcpy(c.w.data(), input, static_cast<std::size_t>(n_));
    c.count = Count(1);
    c.hash = 0;
    if constexpr (kTrack) c.g = Permutation(n_);
    if (ws == nullptr) {
      sort_classes(c, classes_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << classes_.size()) - 1, 0);
      if (test_mode && std::memcmp(c.w.data(), input, static_cast<std::size_t>(n_)) != 0) return false;
    }
    cur0.push_back(std::move(c));
  }
  int entries[kMaxVertices];
  int mult[kMaxVertices];
  for (int i = 0; i < n_; ++i) {
    std::vector<Cand>& cur = *curp;
    std::vector<Cand>& next = *nextp;
    const LevelData& L = levels_[i];
    const int osz = static_cast<int>(L.orbit.size());
    Color t = 0;
    if (test_mode) {
      t = input[i];
    } else {
      for (const auto& c : cur)
        for (Point o : L.orbit) t = std::max(t, c.w[o]);
    }
    if (osz == 1) {
      if (cur.size() == 1) {
        if (cur[0].w[i] > t) return false;
        if (cur[0].w[i] < t) throw ConsistencyError("canonical search lost every candidate");
        continue;
      }
      next.clear();
      for (auto& c : cur) {
        if (c.w[i] > t) return false;
        if (c.w[i] == t) next.push_back(std::move(c));
      }
      std::swap(curp, nextp);
      continue;
    }
    next.clear();
    bool in_place = false;
    for (auto& c : cur) {
      std::uint64_t seen = 0;
      int ne = 0;
      for (int j = 0; j < osz; ++j) {
        const Color v = c.w[L.orbit[j]];
        if (v < t) continue;
        if (v > t) return false;
        const int cls = L.cls[j];
        if (cls >= 0) {
          if ((seen >> cls) & 1U) {
            ++mult[cls];
            continue;
          }
          seen |= std::uint64_t{1} << cls;
          mult[cls] = 1;
        }
        entries[ne++] = j;
      }
      if (cur.size() == 1 && ne == 1 && entries[0] == 0) {
        if (L.cls[0] >= 0 && mult[L.cls[0]] > 1) c.count *= static_cast<unsigned>(mult[L.cls[0]]);
        in_place = true;
        break;
      }
      for (int e = 0; e < ne; ++e) {
        const int j = entries[e];
        const unsigned m = L.cls[j] >= 0 ? static_cast<unsigned>(mult[L.cls[j]]) : 1U;
        Cand child;
        if (j == 0) {
          child.w = c.w;
          if constexpr (kTrack) child.g = c.g;
        } else {
          const Point* u = L.perms[j].data();
          child.w = c.w;
          for (int p = i; p < n_; ++p) child.w[p] = c.w[u[p]];
          if constexpr (kTrack) {
            child.g = Permutation(n_);
            for (int p = 0; p < n_; ++p) child.g.mutable_data()[p] = c.g(u[p]);
          }
          sort_classes(child, L.moved[j], i + 1);
        }
        child.count = c.count;
        if (m > 1) child.count *= m;
        merge_into(next, std::move(child));
      }
    }
    if (!in_place) std::swap(curp, nextp);
  }
  std::vector<Cand>& cur = *curp;
  if (cur.size() != 1) throw ConsistencyError("canonical search ended with distinct candidates");
  stab = cur[0].count;
  if (image != nullptr) std::memcpy(image, cur[0].w.data(), static_cast<std::size_t>(n_));
  if constexpr (kTrack) {
    if (cert != nullptr) *cert = cur[0].g;
  }
  return true;
}

LexCanonizer::Image LexCanonizer::canonical_image(std::span<const Color> coloring) const {
  if (static_cast<int>(coloring.size()) != n_) throw DomainError("coloring width does not match group degree");
  Image out;
  out.coloring.resize(n_);
  if (small_) {
    std::uint64_t stab = 0;
    search<std::uint64_t, true>(coloring.data(), false, nullptr, stab, out.coloring.data(), &out.certificate);
    out.stabilizer_order = stab;
  } else {
    search<BigInt, true>(coloring.data(), false, nullptr, out.stabilizer_order, out.coloring.data(), &out.certificate);
  }
  return out;
}

bool LexCanonizer::is_canonical(std::span<const Color> coloring) const {
  if (static_cast<int>(coloring.size()) != n_) throw DomainError("coloring width does not match group degree");
  if (small_) {
    std::uint64_t stab = 0;
    return search<std::uint64_t, false>(coloring.data(), true, nullptr, stab, nullptr, nullptr);
  }
  BigInt stab;
  return search<BigInt, false>(coloring.data(), true, nullptr, stab, nullptr, nullptr);
}

BigInt LexCanonizer::stabilizer_order(std::span<const Color> coloring) const {
  return canonical_image(coloring).stabilizer_order;
}

BigInt LexCanonizer::orbit_size(std::span<const Color> coloring) const {
  return order_ / stabilizer_order(coloring);
}

bool LexCanonizer::sorted_in_classes(const Color* coloring) const {
  for (const auto& cls : classes_)
    for (std::size_t a = 1; a < cls.size(); ++a)
      if (coloring[cls[a - 1]] < coloring[cls[a]]) return false;
  return true;
}

bool LexCanonizer::is_canonical_sorted(const Color* coloring, std::uint64_t& stab, Workspace<std::uint64_t>& ws) const {
  if (!small_) throw DomainError("group too large for 64-bit stabilizer counts");
  return search<std::uint64_t, false>(coloring, true, &ws, stab, nullptr, nullptr);
}

bool LexCanonizer::is_canonical_sorted(const Color* coloring, BigInt& stab, Workspace<BigInt>& ws) const {
  return search<BigInt, false>(coloring, true, &ws, stab, nullptr, nullptr);
}

}  // namespace gsci
