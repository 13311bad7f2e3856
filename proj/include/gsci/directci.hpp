#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gsci/bits.hpp"
#include "gsci/channels.hpp"
#include "gsci/graphs.hpp"

namespace gsci {

inline constexpr int kDirectMaxVertices = 26;
inline constexpr int kDenseMaxVertices = 10;

// Eigenvalues in graph-state basis order: lambda over all n vertices (sigma_RB),
// lambda_a over the system (sigma_B), mu over the system (omega_B).
struct DenseSpectrum {
  std::vector<double> lambda;
  std::vector<double> lambda_a;
  std::vector<double> mu;
};

// One column (U1, U2, U3) of disjoint system subsets, padded to k + r vertices.
struct USubsets {
  VertexMask u1 = 0, u2 = 0, u3 = 0;
  friend bool operator==(const USubsets&, const USubsets&) = default;
};

// Streams all 4^k disjoint triples. Column j has digit (j / 4^i) % 4 at vertex i:
// 0 none, 1 in U1, 2 in U2, 3 in U3.
void for_each_u_subsets(int k, const std::function<void(const USubsets&)>& f);
std::vector<USubsets> get_u_subsets(int k, int r);
std::array<std::vector<int>, 3> get_u_subsets_card(int k);
// Columns are the subsets of {0..k-1} in increasing integer order.
std::vector<VertexMask> subsets(int k);
// out[i] = v[pi[i]]
std::vector<double> perm_vector(std::span<const double> v, std::span<const std::uint64_t> pi);

DenseSpectrum direct_lambda(const CodeGraph& g, const PauliParams& p);
DenseSpectrum direct_lambda_serial(const CodeGraph& g, const PauliParams& p);
double direct_ci(const CodeGraph& g, const PauliParams& p);
double direct_ci_serial(const CodeGraph& g, const PauliParams& p);
double spectrum_ci(const DenseSpectrum& s, int k_sys);

double dense_oracle_ci(const CodeGraph& g, const PauliParams& p);

}  // namespace gsci
