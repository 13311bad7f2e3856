#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsci/bits.hpp"
#include "gsci/errors.hpp"

namespace gsci {

// Distinct reasons a graph can be rejected.
enum class GraphErrorKind {
  kMalformed,     // not parseable as the graph JSON schema
  kNonSymmetric,  // edge not listed as i < j, listed twice, or adjacency not symmetric
  kSelfLoop,
  kVertexRange,   // edge endpoint outside 0..n-1 or n outside 2..64
  kDisconnected,
  kPartition,     // k_sys outside 1..n-1
  kEnvEdge,       // environment-environment edge where forbidden
};

class GraphError : public FormatError {
 public:
  GraphError(GraphErrorKind kind, const std::string& msg) : FormatError(msg), kind_(kind) {}
  GraphErrorKind kind() const { return kind_; }

 private:
  GraphErrorKind kind_;
};

using Edge = std::pair<int, int>;

// Simple connected graph; vertices 0..k_sys-1 are system, the rest environment.
class CodeGraph {
 public:
  CodeGraph(int k_sys, std::vector<VertexMask> adjacency);
  static CodeGraph from_edges(int n, int k_sys, std::span<const Edge> edges);

  int n() const { return static_cast<int>(adj_.size()); }
  int k_sys() const { return k_sys_; }
  int k_env() const { return n() - k_sys_; }
  VertexMask neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  bool adjacent(int u, int v) const { return test_bit(neighbors(u), v); }
  std::span<const VertexMask> adjacency() const { return adj_; }
  VertexMask system_mask() const { return low_mask(k_sys_); }
  VertexMask env_mask() const { return low_mask(n()) & ~system_mask(); }

  // Γ·x over GF(2), as a mask over all n vertices.
  VertexMask multiply(VertexMask x) const;
  // Γ_AR as k_sys rows of k_env-bit masks (environment vertex k_sys+j is bit j).
  std::vector<VertexMask> system_env_block() const;
  // Γ_AR·b: for b a k_env-bit mask, the resulting system mask.
  VertexMask env_to_system(VertexMask b) const;
  bool has_env_edges() const;
  std::vector<Edge> edges() const;

  friend bool operator==(const CodeGraph&, const CodeGraph&) = default;

 private:
  int k_sys_;
  std::vector<VertexMask> adj_;
};

// Validates a symmetric zero-diagonal adjacency; `connected` is checked when requested.
void validate_adjacency(std::span<const VertexMask> adj, int k_sys, bool require_connected);
bool is_connected(std::span<const VertexMask> adj);

CodeGraph repetition_graph(int k);
CodeGraph cat_graph(int n1, int n2);
CodeGraph tree_graph(std::span<const int> branch_leaf_counts);
CodeGraph shor_graph();
CodeGraph local_complement(const CodeGraph& g, int v);
// Relabels vertex v as perm[v]; the result must keep the system set in front.
CodeGraph relabel(const CodeGraph& g, std::span<const int> perm);

struct LoadOptions {
  bool reject_env_edges = false;
};

std::string graph_to_json(const CodeGraph& g);
CodeGraph graph_from_json(const std::string& text, LoadOptions opts = {});
CodeGraph load_graph(const std::filesystem::path& path, LoadOptions opts = {});
void save_graph(const CodeGraph& g, const std::filesystem::path& path);

}  // namespace gsci
