#include "gsci/symci.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <omp.h>

#include "json.hpp"

#include "gsci/errors.hpp"

namespace gsci {

// ---------------------------------------------------------------- SparsePoly

SparsePoly::SparsePoly(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.e < b.e; });
  for (const Term& t : terms) {
    if (t.c == 0) continue;
    if (!terms_.empty() && terms_.back().e == t.e)
      terms_.back().c = checked_add(terms_.back().c, t.c);
    else
      terms_.push_back(t);
  }
}

Coefficient SparsePoly::coefficient(Exponents e) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), e, [](const Term& t, const Exponents& x) { return t.e < x; });
  return it != terms_.end() && it->e == e ? it->c : 0;
}

Coefficient SparsePoly::coefficient_sum() const {
  Coefficient s = 0;
  for (const Term& t : terms_) s = checked_add(s, t.c);
  return s;
}

double SparsePoly::evaluate(const PauliParams& p, int k) const {
  double s = 0.0;
  for (const Term& t : terms_) {
    int e0 = k - t.e[0] - t.e[1] - t.e[2];
    if (e0 < 0) throw DomainError("monomial degree exceeds k");
    s += to_double(t.c) * std::pow(p.p(1), t.e[0]) * std::pow(p.p(2), t.e[1]) * std::pow(p.p(3), t.e[2]) *
         std::pow(p.p0(), e0);
  }
  return s;
}

// --------------------------------------------------------- SpectrumEvaluator

SpectrumEvaluator::SpectrumEvaluator(const CISpectrum& s) : k_(s.k_sys) {
  if (s.k_sys < 1) throw DomainError("spectrum has no system qubits");
  std::map<Exponents, std::uint32_t> ids;
  auto fill = [&](const std::vector<OrbitTerm>& terms, Block& b) {
    b.offsets.push_back(0);
    for (const auto& t : terms) {
      for (const auto& term : t.poly.terms()) {
        if (term.e[0] + term.e[1] + term.e[2] > k_) throw DomainError("monomial degree exceeds k_sys");
        auto [it, inserted] = ids.emplace(term.e, static_cast<std::uint32_t>(monomials_.size()));
        if (inserted) monomials_.push_back(term.e);
        b.mono.push_back(it->second);
        b.coeff.push_back(to_double(term.c));
      }
      b.offsets.push_back(static_cast<std::uint32_t>(b.mono.size()));
      b.mult.push_back(to_double(t.multiplicity));
    }
  };
  fill(s.rb_terms, rb_);
  fill(s.b_terms, b_);
  b_.scale = std::ldexp(1.0, -s.k_env);
}

void SpectrumEvaluator::monomial_values(const PauliParams& p, std::vector<double>& out) const {
  std::array<std::vector<double>, 4> pw;
  for (int j = 0; j < 4; ++j) {
    pw[j].resize(k_ + 1);
    for (int e = 0; e <= k_; ++e) pw[j][e] = std::pow(p.p(j), e);
  }
  out.resize(monomials_.size());
  for (std::size_t m = 0; m < monomials_.size(); ++m) {
    const auto& e = monomials_[m];
    out[m] = pw[1][e[0]] * pw[2][e[1]] * pw[3][e[2]] * pw[0][k_ - e[0] - e[1] - e[2]];
  }
}

std::vector<double> SpectrumEvaluator::values(const Block& b, const std::vector<double>& mv) const {
  std::vector<double> v(b.mult.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    double s = 0.0;
    for (std::uint32_t j = b.offsets[t]; j < b.offsets[t + 1]; ++j) s += b.coeff[j] * mv[b.mono[j]];
    v[t] = s * b.scale;
  }
  return v;
}

SpectrumEvaluator::Result SpectrumEvaluator::evaluate(const PauliParams& p) const {
  std::vector<double> mv;
  monomial_values(p, mv);
  Result r;
  auto entropy = [](const Block& b, const std::vector<double>& v, double& h, double& tr) {
    KahanSum hs, ts;
    for (std::size_t t = 0; t < v.size(); ++t) {
      hs.add(b.mult[t] * entropy_term(v[t]));
      ts.add(b.mult[t] * v[t]);
    }
    h = hs.value();
    tr = ts.value();
  };
  entropy(rb_, values(rb_, mv), r.h_rb, r.trace_rb);
  entropy(b_, values(b_, mv), r.h_b, r.trace_b);
  r.ci = (r.h_b - r.h_rb) / k_;
  return r;
}

std::vector<double> SpectrumEvaluator::rb_values(const PauliParams& p) const {
  std::vector<double> mv;
  monomial_values(p, mv);
  return values(rb_, mv);
}

std::vector<double> SpectrumEvaluator::b_values(const PauliParams& p) const {
  std::vector<double> mv;
  monomial_values(p, mv);
  return values(b_, mv);
}

double evaluate_ci(const CISpectrum& s, const PauliParams& p) { return SpectrumEvaluator(s).ci(p); }

SymmetricOptions SymmetricOptions::from_env() {
  SymmetricOptions o;
  if (const char* cap = std::getenv("GSCI_MEM_CAP"); cap != nullptr && *cap != '\0') {
    char* end = nullptr;
    double v = std::strtod(cap, &end);
    if (end == cap || *end != '\0' || !(v >= 1.0)) throw FormatError(std::string("invalid GSCI_MEM_CAP value '") + cap + "'");
    o.coloring_cap = static_cast<std::uint64_t>(v);
  }
  return o;
}

// ---------------------------------------------------------- BinaryOrbitIndex

namespace {

// Applies a permutation to masks of width <= 32 through byte lookup tables.
struct MaskPermuter {
  std::vector<std::array<std::array<std::uint32_t, 256>, 4>> tables;

  MaskPermuter(int width, std::span<const Permutation> gens) {
    for (const auto& g : gens) {
      auto& t = tables.emplace_back();
      for (int byte = 0; byte < 4; ++byte)
        for (int v = 0; v < 256; ++v) {
          std::uint32_t out = 0;
          for (int b = 0; b < 8; ++b) {
            int p = byte * 8 + b;
            if (p < width && ((v >> b) & 1)) out |= std::uint32_t{1} << g(p);
          }
          t[byte][v] = out;
        }
    }
  }
  std::uint32_t apply(std::size_t g, std::uint32_t m) const {
    const auto& t = tables[g];
    return t[0][m & 255] | t[1][(m >> 8) & 255] | t[2][(m >> 16) & 255] | t[3][m >> 24];
  }
};

constexpr std::uint32_t kUnset = 0xffffffffu;

}  // namespace

BinaryOrbitIndex::BinaryOrbitIndex(int width, std::span<const Permutation> generators, const LexCanonizer& canon,
                                   bool tabulate)
    : width_(width), canon_(&canon) {
  if (canon.degree() != width) throw DomainError("orbit index width does not match canonizer");
  if (!tabulate) return;
  if (width > 30) throw ResourceError("bitstring orbit table wider than 30 bits");
  MaskPermuter perm(width, generators);
  const std::size_t total = std::size_t{1} << width;
  table_.assign(total, kUnset);
  std::vector<std::uint32_t> queue;
  for (std::size_t m0 = 0; m0 < total; ++m0) {
    if (table_[m0] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(reps_.size());
    if (id == kUnset) throw ResourceError("too many bitstring orbits");
    queue.assign(1, static_cast<std::uint32_t>(m0));
    table_[m0] = id;
    VertexMask best = m0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::uint32_t m = queue[head];
      if (lex_greater(m, best)) best = m;
      for (std::size_t g = 0; g < perm.tables.size(); ++g) {
        std::uint32_t img = perm.apply(g, m);
        if (table_[img] == kUnset) {
          table_[img] = id;
          queue.push_back(img);
        }
      }
    }
    reps_.push_back(best);
    sizes_.push_back(queue.size());
  }
}

std::uint32_t BinaryOrbitIndex::register_orbit(VertexMask canonical, u128 size) const {
  std::uint32_t id = 0;
#pragma omp critical(gsci_orbit_registry)
  {
    auto [it, inserted] = registry_.emplace(canonical, static_cast<std::uint32_t>(reps_.size()));
    if (inserted) {
      reps_.push_back(canonical);
      sizes_.push_back(size);
    }
    id = it->second;
  }
  return id;
}

std::uint32_t BinaryOrbitIndex::id(VertexMask m, Cache& cache) const {
  if (!table_.empty()) return table_[m];
  if (auto it = cache.ids.find(m); it != cache.ids.end()) return it->second;
  std::vector<Color> c(width_);
  for (int j = 0; j < width_; ++j) c[j] = test_bit(m, j) ? 1 : 0;
  auto img = canon_->canonical_image(c);
  VertexMask canonical = 0;
  for (int j = 0; j < width_; ++j)
    if (img.coloring[j]) canonical |= bit(j);
  std::uint32_t id = register_orbit(canonical, to_u128(canon_->group_order() / img.stabilizer_order));
  cache.ids.emplace(m, id);
  return id;
}

std::size_t BinaryOrbitIndex::size() const {
  std::size_t s = 0;
#pragma omp critical(gsci_orbit_registry)
  s = reps_.size();
  return s;
}

u128 BinaryOrbitIndex::orbit_size(std::uint32_t id) const {
  if (!table_.empty()) return sizes_[id];
  u128 s = 0;
#pragma omp critical(gsci_orbit_registry)
  s = sizes_[id];
  return s;
}

VertexMask BinaryOrbitIndex::representative(std::uint32_t id) const {
  if (!table_.empty()) return reps_[id];
  VertexMask r = 0;
#pragma omp critical(gsci_orbit_registry)
  r = reps_[id];
  return r;
}

// ----------------------------------------------------- canonical colorings

namespace {

using ColorArray = std::array<Color, kMaxVertices>;

// Depth-first generation of canonical colorings by incrementing one position
// at a time; `hooks.node` returns whether to descend below a node.
template <class Count, class Hooks>
void explore(const LexCanonizer& canon, int colors, ColorArray& C, LexCanonizer::Workspace<Count>& ws, Hooks& hooks,
             int depth) {
  const int k = canon.degree();
  Count stab{};
  for (int i = k - 1; i >= 0; --i) {
    const Color old = C[i];
    if (old + 1 < colors) {
      C[i] = static_cast<Color>(old + 1);
      const int prev = canon.previous_in_class(i);
      if ((prev < 0 || C[prev] >= C[i]) && canon.is_canonical_sorted(C.data(), stab, ws)) {
        hooks.enter(i, old, C[i]);
        if (hooks.node(C, stab, depth + 1)) explore(canon, colors, C, ws, hooks, depth + 1);
        hooks.leave(i, C[i], old);
      }
      C[i] = old;
    }
    if (old != 0) break;
  }
}

template <class Count>
Count root_stabilizer(const LexCanonizer& canon, LexCanonizer::Workspace<Count>& ws) {
  ColorArray zero{};
  Count stab{};
  if (!canon.is_canonical_sorted(zero.data(), stab, ws)) throw ConsistencyError("all-zero coloring is not canonical");
  return stab;
}

template <class Count>
void walk_all(const LexCanonizer& canon, int c, const ColoringVisitor& visit) {
  struct Hooks {
    const ColoringVisitor& visit;
    int k;
    void enter(int, Color, Color) {}
    void leave(int, Color, Color) {}
    bool node(const ColorArray& C, const Count& stab, int) {
      visit(std::span<const Color>(C.data(), static_cast<std::size_t>(k)), BigInt(stab));
      return true;
    }
  } hooks{visit, canon.degree()};
  LexCanonizer::Workspace<Count> ws;
  ColorArray C{};
  hooks.node(C, root_stabilizer(canon, ws), 0);
  explore<Count>(canon, c, C, ws, hooks, 0);
}

}  // namespace

void for_each_canonical_coloring(const LexCanonizer& canon, int c, const ColoringVisitor& visit) {
  if (c < 1 || c > 255) throw DomainError("color count must lie in 1..255");
  if (canon.small_group())
    walk_all<std::uint64_t>(canon, c, visit);
  else
    walk_all<BigInt>(canon, c, visit);
}

std::vector<std::vector<Color>> canonical_colorings(const CodeGraph& g, int c) {
  auto aut = automorphism_group(g);
  LexCanonizer canon(aut.sgs);
  std::vector<std::vector<Color>> out;
  for_each_canonical_coloring(canon, c, [&](std::span<const Color> col, const BigInt&) {
    out.emplace_back(col.begin(), col.end());
  });
  return out;
}

bool is_canonical(std::span<const Color> coloring, const StrongGeneratingSystem& sgs) {
  return LexCanonizer(sgs).is_canonical(coloring);
}

// --------------------------------------------------------- symmetric_lambda

namespace {

class MonomialIndex {
 public:
  explicit MonomialIndex(int k) : k_(k), table_(static_cast<std::size_t>((k + 1) * (k + 1) * (k + 1)), kUnset) {
    for (int e1 = 0; e1 <= k; ++e1)
      for (int e2 = 0; e1 + e2 <= k; ++e2)
        for (int e3 = 0; e1 + e2 + e3 <= k; ++e3) {
          table_[slot(e1, e2, e3)] = static_cast<std::uint32_t>(exps_.size());
          exps_.push_back({static_cast<std::uint8_t>(e1), static_cast<std::uint8_t>(e2), static_cast<std::uint8_t>(e3)});
        }
  }
  std::uint32_t id(int e1, int e2, int e3) const { return table_[slot(e1, e2, e3)]; }
  std::size_t size() const { return exps_.size(); }
  const Exponents& exponents(std::size_t id) const { return exps_[id]; }

 private:
  std::size_t slot(int e1, int e2, int e3) const {
    return static_cast<std::size_t>((e1 * (k_ + 1) + e2) * (k_ + 1) + e3);
  }
  int k_;
  std::vector<std::uint32_t> table_;
  std::vector<Exponents> exps_;
};

// Dense per-orbit coefficient rows, allocated on first touch.
class DenseAccumulator {
 public:
  DenseAccumulator(std::size_t width, std::atomic<std::uint64_t>* bytes, std::uint64_t limit)
      : width_(width), bytes_(bytes), limit_(limit) {}

  u128* row(std::uint32_t id) {
    if (id >= rows_.size()) rows_.resize(static_cast<std::size_t>(id) + 1);
    auto& r = rows_[id];
    if (!r) {
      const std::uint64_t need = width_ * sizeof(u128);
      if (bytes_->fetch_add(need) + need > limit_)
        throw ResourceError("coefficient accumulators exceed " + std::to_string(limit_ >> 20) + " MiB");
      r = std::make_unique<u128[]>(width_);
    }
    return r.get();
  }
  const u128* find(std::uint32_t id) const { return id < rows_.size() ? rows_[id].get() : nullptr; }
  std::size_t rows() const { return rows_.size(); }

  void absorb(DenseAccumulator& other) {
    for (std::uint32_t id = 0; id < other.rows_.size(); ++id) {
      if (!other.rows_[id]) continue;
      if (id >= rows_.size() || !rows_[id]) {
        if (id >= rows_.size()) rows_.resize(static_cast<std::size_t>(id) + 1);
        rows_[id] = std::move(other.rows_[id]);
        continue;
      }
      u128* dst = rows_[id].get();
      const u128* src = other.rows_[id].get();
      for (std::size_t j = 0; j < width_; ++j) dst[j] = checked_add(dst[j], src[j]);
      other.rows_[id].reset();
      bytes_->fetch_sub(width_ * sizeof(u128));
    }
  }

 private:
  std::size_t width_;
  std::atomic<std::uint64_t>* bytes_;
  std::uint64_t limit_;
  std::vector<std::unique_ptr<u128[]>> rows_;
};

constexpr bool x_part(Color c) { return c == 1 || c == 2; }
constexpr bool z_part(Color c) { return c >= 2; }

struct Shared {
  const CodeGraph& g;
  const LexCanonizer& canon;
  const BinaryOrbitIndex& rb_index;
  const BinaryOrbitIndex& a_index;
  const MonomialIndex& monos;
  std::uint64_t cap;
  std::atomic<std::uint64_t> colorings{0};
};

template <class Count>
class LambdaHooks {
 public:
  LambdaHooks(Shared& s, const Count& order, std::atomic<std::uint64_t>* bytes, std::uint64_t limit)
      : s_(s),
        order_(order),
        rb_(s.monos.size(), bytes, limit),
        pre_(s.monos.size(), bytes, limit),
        adj_(s.g.adjacency().data()),
        sys_(s.g.system_mask()) {}

  void reset_state(const ColorArray& C) {
    x_ = z_ = gx_ = 0;
    e_ = {0, 0, 0, 0};
    for (int i = 0; i < s_.g.k_sys(); ++i) {
      if (x_part(C[i])) {
        x_ |= bit(i);
        gx_ ^= adj_[i];
      }
      if (z_part(C[i])) z_ |= bit(i);
      ++e_[C[i]];
    }
  }

  void enter(int i, Color from, Color to) {
    if (x_part(from) != x_part(to)) {
      x_ ^= bit(i);
      gx_ ^= adj_[i];
    }
    if (z_part(from) != z_part(to)) z_ ^= bit(i);
    --e_[from];
    ++e_[to];
  }
  void leave(int i, Color from, Color to) { enter(i, from, to); }

  bool node(const ColorArray&, const Count& stab, int depth) {
    accumulate(stab);
    if (++pending_ == 4096) flush();
    return depth < stop_depth_;
  }

  void flush() {
    if (s_.colorings.fetch_add(pending_) + pending_ > s_.cap)
      throw ResourceError("canonical 4-coloring count exceeds the cap of " + std::to_string(s_.cap) +
                          " (raise GSCI_MEM_CAP to allow more)");
    pending_ = 0;
  }

  int stop_depth_ = 1 << 30;
  u128 sum_orbits_ = 0;
  DenseAccumulator& rb() { return rb_; }
  DenseAccumulator& pre() { return pre_; }

 private:
  void accumulate(const Count& stab) {
    const VertexMask u = gx_ ^ z_;
    const std::uint32_t id_rb = s_.rb_index.id(u, cache_rb_);
    const std::uint32_t id_a = s_.a_index.id(u & sys_, cache_a_);
    const u128 m2 = s_.rb_index.orbit_size(id_rb);
    const u128 m2a = s_.a_index.orbit_size(id_a);
    u128 w_rb, w_a, m4;
    if constexpr (std::is_same_v<Count, std::uint64_t>) {
      if (stab == 0 || order_ % stab != 0) throw ConsistencyError("stabilizer order does not divide the group order");
      const std::uint64_t m = order_ / stab;
      m4 = m;
      if (m2 > m || m % static_cast<std::uint64_t>(m2) != 0 || m2a > m || m % static_cast<std::uint64_t>(m2a) != 0)
        integrality_failure(u, m, m2, m2a);
      w_rb = m / static_cast<std::uint64_t>(m2);
      w_a = m / static_cast<std::uint64_t>(m2a);
    } else {
      if (order_ % stab != 0) throw ConsistencyError("stabilizer order does not divide the group order");
      m4 = to_u128(order_ / stab);
      if (m4 % m2 != 0 || m4 % m2a != 0) integrality_failure(u, m4, m2, m2a);
      w_rb = m4 / m2;
      w_a = m4 / m2a;
    }
    sum_orbits_ += m4;
    const std::uint32_t mono = s_.monos.id(e_[1], e_[2], e_[3]);
    rb_.row(id_rb)[mono] += w_rb;
    pre_.row(id_a)[mono] += w_a;
  }

  [[noreturn]] void integrality_failure(VertexMask u, u128 m4, u128 m2, u128 m2a) const {
    std::ostringstream os;
    os << "non-integral orbit weight at U=0x" << std::hex << u << std::dec << ": m4=" << to_decimal(m4)
       << " m2=" << to_decimal(m2) << " m2'=" << to_decimal(m2a);
    throw ConsistencyError(os.str());
  }

  Shared& s_;
  Count order_;
  DenseAccumulator rb_, pre_;
  BinaryOrbitIndex::Cache cache_rb_, cache_a_;
  const VertexMask* adj_;
  VertexMask sys_;
  VertexMask x_ = 0, z_ = 0, gx_ = 0;
  std::array<int, 4> e_{};
  std::uint64_t pending_ = 0;
};

// Collects the canonical nodes at exactly `depth` increments below the root.
template <class Count>
struct FrontierHooks {
  int target;
  std::vector<ColorArray>& out;
  void enter(int, Color, Color) {}
  void leave(int, Color, Color) {}
  bool node(const ColorArray& C, const Count&, int depth) {
    if (depth == target) {
      out.push_back(C);
      return false;
    }
    return true;
  }
};

// Frontier hooks that also feed the accumulator for the nodes above the frontier.
template <class Count>
struct SplitHooks {
  LambdaHooks<Count>& acc;
  int target;
  std::vector<ColorArray>& out;
  void enter(int i, Color a, Color b) { acc.enter(i, a, b); }
  void leave(int i, Color a, Color b) { acc.leave(i, a, b); }
  bool node(const ColorArray& C, const Count& stab, int depth) {
    acc.node(C, stab, depth);
    if (depth == target) {
      out.push_back(C);
      return false;
    }
    return true;
  }
};

template <class Count>
Count order_as(const BigInt& v) {
  if constexpr (std::is_same_v<Count, std::uint64_t>)
    return static_cast<std::uint64_t>(v);
  else
    return v;
}

u128 pow_u128(u128 base, int e) {
  u128 r = 1;
  for (int i = 0; i < e; ++i) r = checked_mul(r, base);
  return r;
}

SparsePoly dense_to_poly(const u128* row, const MonomialIndex& monos) {
  std::vector<SparsePoly::Term> terms;
  for (std::size_t j = 0; j < monos.size(); ++j)
    if (row[j] != 0) terms.push_back({monos.exponents(j), row[j]});
  return SparsePoly(std::move(terms));
}

template <class Count>
CISpectrum build_spectrum(const CodeGraph& g, const SymmetricOptions& opts, SymmetricStats* stats, bool parallel) {
  const int k = g.k_sys();
  const int r = g.k_env();
  if (2 * k + r > 126) throw ResourceError("code too large for 128-bit spectrum coefficients");
  if (r > 30) throw ResourceError("more than 30 environment vertices");
  const ColoredGraphAut aut = automorphism_group(g);
  const LexCanonizer canon_a(aut.sgs);
  const LexCanonizer canon_n(aut.full);
  const BigInt order_a = aut.sgs.order();
  {
    BigInt lower = (BigInt(1) << (2 * k)) / order_a;
    if (lower > opts.coloring_cap)
      throw ResourceError("at least " + lower.str() + " canonical 4-colorings expected, cap is " +
                          std::to_string(opts.coloring_cap) + " (raise GSCI_MEM_CAP to allow more)");
  }
  std::vector<Permutation> gens_a;
  for (const auto& p : aut.generators) gens_a.push_back(p.restricted(k));
  const BinaryOrbitIndex rb_index(g.n(), aut.generators, canon_n, g.n() <= opts.table_width);
  const BinaryOrbitIndex a_index(k, gens_a, canon_a, k <= opts.table_width);
  const MonomialIndex monos(k);
  Shared shared{g, canon_a, rb_index, a_index, monos, opts.coloring_cap};
  std::atomic<std::uint64_t> bytes{0};
  const Count order = order_as<Count>(order_a);

  LambdaHooks<Count> main(shared, order, &bytes, opts.accumulator_bytes);
  LexCanonizer::Workspace<Count> ws;
  ColorArray C{};
  main.reset_state(C);
  main.node(C, root_stabilizer(canon_a, ws), 0);

  int threads = parallel ? (opts.threads > 0 ? opts.threads : omp_get_max_threads()) : 1;
  if (threads <= 1) {
    explore<Count>(canon_a, 4, C, ws, main, 0);
  } else {
    // choose a frontier depth giving enough independent subtrees
    int depth = 1;
    for (; depth < 3 * k; ++depth) {
      std::vector<ColorArray> probe;
      FrontierHooks<Count> fh{depth, probe};
      ColorArray Z{};
      explore<Count>(canon_a, 4, Z, ws, fh, 0);
      if (probe.size() >= static_cast<std::size_t>(64 * threads)) break;
    }
    std::vector<ColorArray> tasks;
    SplitHooks<Count> split{main, depth, tasks};
    explore<Count>(canon_a, 4, C, ws, split, 0);
    std::vector<std::unique_ptr<LambdaHooks<Count>>> locals(threads);
    std::exception_ptr error;
    std::atomic<bool> failed{false};
#pragma omp parallel num_threads(threads)
    {
      const int t = omp_get_thread_num();
      try {
        locals[t] = std::make_unique<LambdaHooks<Count>>(shared, order, &bytes, opts.accumulator_bytes);
      } catch (...) {
#pragma omp critical(gsci_lambda_error)
        if (!error) error = std::current_exception();
        failed = true;
      }
      LexCanonizer::Workspace<Count> tws;
#pragma omp for schedule(dynamic, 1)
      for (std::size_t task = 0; task < tasks.size(); ++task) {
        if (failed) continue;
        try {
          ColorArray TC = tasks[task];
          locals[t]->reset_state(TC);
          explore<Count>(canon_a, 4, TC, tws, *locals[t], depth);
        } catch (...) {
#pragma omp critical(gsci_lambda_error)
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    }
    if (error) std::rethrow_exception(error);
    for (auto& l : locals) {
      l->flush();
      main.rb().absorb(l->rb());
      main.pre().absorb(l->pre());
      main.sum_orbits_ += l->sum_orbits_;
    }
  }
  main.flush();
  if (main.sum_orbits_ != pow_u128(4, k))
    throw ConsistencyError("orbit sizes of canonical 4-colorings do not sum to 4^k");

  CISpectrum out;
  out.k_sys = k;
  out.k_env = r;
  u128 trace_rb = 0;
  // hashed orbit ids depend on registration order; emit terms by orbit representative
  std::vector<std::pair<VertexMask, std::uint32_t>> rb_order;
  for (std::uint32_t id = 0; id < main.rb().rows(); ++id)
    if (main.rb().find(id) != nullptr) rb_order.emplace_back(rb_index.representative(id), id);
  std::sort(rb_order.begin(), rb_order.end());
  for (const auto& [rep, id] : rb_order) {
    OrbitTerm term{dense_to_poly(main.rb().find(id), monos), rb_index.orbit_size(id)};
    trace_rb = checked_add(trace_rb, checked_mul(term.multiplicity, term.poly.coefficient_sum()));
    out.rb_terms.push_back(std::move(term));
  }
  if (trace_rb != pow_u128(4, k)) throw ConsistencyError("sigma_RB spectrum is not trace normalized");

  // fold the environment: sigma_B(a) = 2^-r sum_b lambda_pre(a + Gamma_AR b)
  std::vector<VertexMask> delta(std::size_t{1} << r);
  for (std::size_t b = 0; b < delta.size(); ++b) delta[b] = g.env_to_system(b);
  std::uint64_t twos = 0;
  u128 trace_b = 0;
  {
    std::vector<u128> acc(monos.size());
    BinaryOrbitIndex::Cache cache;
    struct Hooks {
      VertexMask a = 0;
      std::function<void(VertexMask, const Count&)> f;
      void enter(int i, Color, Color) { a ^= bit(i); }
      void leave(int i, Color, Color) { a ^= bit(i); }
      bool node(const ColorArray&, const Count& stab, int) {
        f(a, stab);
        return true;
      }
    } hooks;
    hooks.f = [&](VertexMask a, const Count& stab) {
      if (++twos > opts.coloring_cap) throw ResourceError("canonical 2-coloring count exceeds the cap");
      std::fill(acc.begin(), acc.end(), 0);
      for (VertexMask d : delta) {
        const u128* row = main.pre().find(a_index.id(a ^ d, cache));
        if (row == nullptr) continue;
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += row[j];
      }
      OrbitTerm term{dense_to_poly(acc.data(), monos), to_u128(BigInt(order_a / BigInt(stab)))};
      if (term.poly.empty()) return;
      trace_b = checked_add(trace_b, checked_mul(term.multiplicity, term.poly.coefficient_sum()));
      out.b_terms.push_back(std::move(term));
    };
    ColorArray A{};
    hooks.node(A, root_stabilizer(canon_a, ws), 0);
    explore<Count>(canon_a, 2, A, ws, hooks, 0);
  }
  if (trace_b != checked_mul(pow_u128(4, k), u128{1} << r))
    throw ConsistencyError("sigma_B spectrum is not trace normalized");

  if (stats != nullptr) {
    stats->canonical_4_colorings = shared.colorings.load();
    stats->canonical_2_colorings = twos;
    stats->rb_orbits = out.rb_terms.size();
    stats->b_orbits = out.b_terms.size();
    stats->group_order = aut.order;
  }
  return out;
}

CISpectrum dispatch(const CodeGraph& g, const SymmetricOptions& opts, SymmetricStats* stats, bool parallel) {
  if (automorphism_group(g).sgs.order() < (BigInt(1) << 62)) return build_spectrum<std::uint64_t>(g, opts, stats, parallel);
  return build_spectrum<BigInt>(g, opts, stats, parallel);
}

}  // namespace

CISpectrum symmetric_lambda(const CodeGraph& g, const SymmetricOptions& opts, SymmetricStats* stats) {
  return dispatch(g, opts, stats, opts.parallel);
}

CISpectrum symmetric_lambda_serial(const CodeGraph& g, const SymmetricOptions& opts, SymmetricStats* stats) {
  return dispatch(g, opts, stats, false);
}

// ------------------------------------------------------------- cache files

namespace {

nlohmann::ordered_json terms_to_json(const std::vector<OrbitTerm>& terms) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : terms) {
    nlohmann::ordered_json poly = nlohmann::ordered_json::object();
    for (const auto& term : t.poly.terms())
      poly[std::to_string(term.e[0]) + "," + std::to_string(term.e[1]) + "," + std::to_string(term.e[2])] =
          to_decimal(term.c);
    nlohmann::ordered_json o;
    o["multiplicity"] = to_decimal(t.multiplicity);
    o["poly"] = std::move(poly);
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<OrbitTerm> terms_from_json(const nlohmann::json& arr, int k) {
  if (!arr.is_array()) throw FormatError("spectrum terms must be an array");
  std::vector<OrbitTerm> out;
  for (const auto& o : arr) {
    if (!o.is_object() || !o.contains("multiplicity") || !o.contains("poly") || !o["multiplicity"].is_string() ||
        !o["poly"].is_object())
      throw FormatError("spectrum term needs a multiplicity string and a poly object");
    std::vector<SparsePoly::Term> terms;
    for (const auto& [key, val] : o["poly"].items()) {
      int e[3];
      if (std::sscanf(key.c_str(), "%d,%d,%d", &e[0], &e[1], &e[2]) != 3 || e[0] < 0 || e[1] < 0 || e[2] < 0 ||
          e[0] + e[1] + e[2] > k)
        throw FormatError("invalid exponent key '" + key + "'");
      if (!val.is_string()) throw FormatError("coefficients must be decimal strings");
      Coefficient c = parse_u128(val.get<std::string>());
      if (c == 0) throw FormatError("zero coefficient in spectrum cache");
      terms.push_back({{static_cast<std::uint8_t>(e[0]), static_cast<std::uint8_t>(e[1]), static_cast<std::uint8_t>(e[2])}, c});
    }
    out.push_back({SparsePoly(std::move(terms)), parse_u128(o["multiplicity"].get<std::string>())});
  }
  return out;
}

}  // namespace

std::string spectrum_to_json(const CISpectrum& s) {
  nlohmann::ordered_json j;
  j["k_sys"] = s.k_sys;
  j["k_env"] = s.k_env;
  j["rb_terms"] = terms_to_json(s.rb_terms);
  j["b_terms"] = terms_to_json(s.b_terms);
  return j.dump() + "\n";
}

CISpectrum spectrum_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed spectrum JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("k_sys") || !j.contains("k_env") || !j["k_sys"].is_number_integer() ||
      !j["k_env"].is_number_integer() || !j.contains("rb_terms") || !j.contains("b_terms"))
    throw FormatError("spectrum JSON needs k_sys, k_env, rb_terms and b_terms");
  CISpectrum s;
  s.k_sys = j["k_sys"].get<int>();
  s.k_env = j["k_env"].get<int>();
  if (s.k_sys < 1 || s.k_env < 1 || s.k_sys + s.k_env > kMaxVertices) throw FormatError("spectrum sizes out of range");
  s.rb_terms = terms_from_json(j["rb_terms"], s.k_sys);
  s.b_terms = terms_from_json(j["b_terms"], s.k_sys);
  return s;
}

void save_spectrum(const CISpectrum& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write spectrum file " + path.string());
  out << spectrum_to_json(s);
}

CISpectrum load_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open spectrum file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return spectrum_from_json(ss.str());
}

}  // namespace gsci
