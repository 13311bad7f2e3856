#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsci/channels.hpp"
#include "gsci/graphs.hpp"
#include "gsci/symci.hpp"

namespace gsci {

inline constexpr int kSignGridPoints = 17;

// CI along a ray as a function of the noise scale x.
using RayFunction = std::function<double(double)>;

// Signs of f at x = j/32, j = 0..16; true means strictly positive.
std::array<bool, kSignGridPoints> sign_grid(const RayFunction& f);

// Largest x in [0, 0.5] with f(x) > 0, located by bisection to width eps.
// Returns nullopt when f(0) <= 0. Throws ConsistencyError when the sign grid is
// not a run of positives followed by non-positives, or post-verification fails.
std::optional<double> ray_threshold(const RayFunction& f, double eps = kDefaultEps);
// CI minus its rounding floor; its sign is what thresholds bisect on.
double resolved_ci(const SpectrumEvaluator& ev, const PauliParams& p);
std::optional<double> threshold(const SpectrumEvaluator& ev, const RayDirection& d, double eps = kDefaultEps);
std::optional<double> threshold(const CISpectrum& s, const RayDirection& d, double eps = kDefaultEps);

struct ThresholdSample {
  double theta = 0, phi = 0;
  RayDirection direction{1, 0, 0};
  std::optional<double> x_code;
  double x_single = 0;
  std::optional<double> delta;
};

struct ScanOptions {
  int threads = 0;  // 0: OpenMP default
  bool parallel = true;
  double eps = kDefaultEps;
};

// Direction at a spherical grid node, scaled to sum 1.
RayDirection spherical_direction(double theta, double phi);
std::vector<ThresholdSample> surface(const CISpectrum& s, int resolution, const ScanOptions& opts = {});
std::string surface_csv(std::span<const ThresholdSample> samples);

struct RateNode {
  double r = 0, y = 0;
  std::array<double, 3> p{};
  std::optional<double> best_ci, single_ci, diff;  // empty outside the reported region
  int best_code = -1;
};

// Plane p = (r/s, y, r f/s) with s = sqrt(1 + f^2), r and y on grid points over [0, 0.5].
std::vector<RateNode> rate_planes(std::span<const CISpectrum> spectra, double f, int grid, const ScanOptions& opts = {});
std::string rates_csv(std::span<const RateNode> nodes);

struct SearchRecord {
  std::string canon_key;
  int k_sys = 0, k_env = 0;
  std::optional<double> threshold;
  bool is_best = false;
  CodeGraph graph;
};

struct SearchOptions {
  std::uint64_t max_candidates = std::uint64_t{1} << 24;
  double best_tolerance = 1e-9;
  ScanOptions scan;
  SymmetricOptions symmetric;
};

struct SearchResult {
  std::vector<SearchRecord> records;  // in order of first appearance
  std::uint64_t labeled_candidates = 0;
  std::uint64_t connected_candidates = 0;
  std::size_t system_graphs = 0;
};

// One adjacency list per isomorphism class of graphs on n vertices (connected or not).
std::vector<std::vector<VertexMask>> nonisomorphic_graphs(int n);
SearchResult exhaustive_search(int k_sys, int k_env_max, const RayDirection& d, const SearchOptions& opts = {});
std::string search_csv(std::span<const SearchRecord> records);

// Rooted 2-level trees with k_sys system vertices, as nonincreasing leaf counts per branch.
std::vector<std::vector<int>> two_level_trees(int k_sys);
BigInt tree_automorphism_order(std::span<const int> leaf_counts);

}  // namespace gsci
