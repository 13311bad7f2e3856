#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsci/channels.hpp"
#include "gsci/graphs.hpp"
#include "gsci/numeric.hpp"
#include "gsci/permgroup.hpp"

namespace gsci {

using Coefficient = u128;
using Exponents = std::array<std::uint8_t, 3>;  // exponents of q1, q2, q3

// Polynomial in q1, q2, q3 with positive integer coefficients.
class SparsePoly {
 public:
  struct Term {
    Exponents e;
    Coefficient c;
    friend bool operator==(const Term&, const Term&) = default;
  };

  SparsePoly() = default;
  // Terms may arrive in any order; duplicates are summed, zeros dropped.
  explicit SparsePoly(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  Coefficient coefficient(Exponents e) const;
  Coefficient coefficient_sum() const;
  // Evaluated on the p-form: sum c * p1^e1 p2^e2 p3^e3 p0^(k - e1 - e2 - e3).
  double evaluate(const PauliParams& p, int k) const;

  friend bool operator==(const SparsePoly&, const SparsePoly&) = default;

 private:
  std::vector<Term> terms_;
};

struct OrbitTerm {
  SparsePoly poly;
  u128 multiplicity = 0;
  friend bool operator==(const OrbitTerm&, const OrbitTerm&) = default;
};

// Orbit-compressed eigenvalue lists of sigma_RB and sigma_B. An sigma_RB term has
// value poly evaluated on the p-form; an sigma_B term additionally carries 1/2^k_env.
struct CISpectrum {
  int k_sys = 0;
  int k_env = 0;
  std::vector<OrbitTerm> rb_terms;
  std::vector<OrbitTerm> b_terms;
  friend bool operator==(const CISpectrum&, const CISpectrum&) = default;
};

// Precomputed flat layout for repeated evaluation.
class SpectrumEvaluator {
 public:
  explicit SpectrumEvaluator(const CISpectrum& s);

  struct Result {
    double h_rb = 0, h_b = 0;          // entropies in bits
    double trace_rb = 0, trace_b = 0;  // should be 1
    double ci = 0;
  };
  Result evaluate(const PauliParams& p) const;
  double ci(const PauliParams& p) const { return evaluate(p).ci; }
  int k_sys() const { return k_; }

  // Eigenvalues of each orbit term (not expanded by multiplicity).
  std::vector<double> rb_values(const PauliParams& p) const;
  std::vector<double> b_values(const PauliParams& p) const;

 private:
  struct Block {
    std::vector<std::uint32_t> offsets;  // term t uses [offsets[t], offsets[t+1])
    std::vector<std::uint32_t> mono;     // index into monomials_
    std::vector<double> coeff;
    std::vector<double> mult;
    double scale = 1.0;
  };
  void monomial_values(const PauliParams& p, std::vector<double>& out) const;
  std::vector<double> values(const Block& b, const std::vector<double>& mv) const;

  int k_;
  std::vector<Exponents> monomials_;
  Block rb_, b_;
};

double evaluate_ci(const CISpectrum& s, const PauliParams& p);

struct SymmetricOptions {
  std::uint64_t coloring_cap = 100'000'000;  // canonical 4-colorings allowed
  std::uint64_t accumulator_bytes = std::uint64_t{4} << 30;
  int table_width = 26;  // bitstring orbits are tabulated up to this width
  int threads = 0;       // 0: OpenMP default
  bool parallel = true;
  // Defaults with GSCI_MEM_CAP applied when set.
  static SymmetricOptions from_env();
};

struct SymmetricStats {
  std::uint64_t canonical_4_colorings = 0;
  std::uint64_t canonical_2_colorings = 0;
  std::size_t rb_orbits = 0;
  std::size_t b_orbits = 0;
  BigInt group_order;
};

CISpectrum symmetric_lambda(const CodeGraph& g, const SymmetricOptions& opts = SymmetricOptions::from_env(),
                            SymmetricStats* stats = nullptr);
// Single-threaded reference path.
CISpectrum symmetric_lambda_serial(const CodeGraph& g, const SymmetricOptions& opts = SymmetricOptions::from_env(),
                                   SymmetricStats* stats = nullptr);

bool is_canonical(std::span<const Color> coloring, const StrongGeneratingSystem& sgs);

// Canonical colorings of [c]^degree, depth-first, each with its stabilizer order.
using ColoringVisitor = std::function<void(std::span<const Color>, const BigInt& stabilizer_order)>;
void for_each_canonical_coloring(const LexCanonizer& canon, int c, const ColoringVisitor& visit);
std::vector<std::vector<Color>> canonical_colorings(const CodeGraph& g, int c);

// Orbits of bitstrings of a fixed width under a permutation group.
class BinaryOrbitIndex {
 public:
  struct Cache {
    std::unordered_map<VertexMask, std::uint32_t> ids;
  };

  BinaryOrbitIndex(int width, std::span<const Permutation> generators, const LexCanonizer& canon, bool tabulate);

  int width() const { return width_; }
  bool tabulated() const { return !table_.empty(); }
  // Orbit id of a mask. Thread-safe; the cache is per thread.
  std::uint32_t id(VertexMask m, Cache& cache) const;
  std::size_t size() const;
  u128 orbit_size(std::uint32_t id) const;
  VertexMask representative(std::uint32_t id) const;

 private:
  std::uint32_t register_orbit(VertexMask canonical, u128 size) const;

  int width_;
  const LexCanonizer* canon_;
  std::vector<std::uint32_t> table_;
  mutable std::vector<VertexMask> reps_;
  mutable std::vector<u128> sizes_;
  mutable std::unordered_map<VertexMask, std::uint32_t> registry_;
};

std::string spectrum_to_json(const CISpectrum& s);
CISpectrum spectrum_from_json(const std::string& text);
void save_spectrum(const CISpectrum& s, const std::filesystem::path& path);
CISpectrum load_spectrum(const std::filesystem::path& path);

}  // namespace gsci
