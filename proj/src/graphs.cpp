#include "gsci/graphs.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace gsci {
namespace {

[[noreturn]] void fail(GraphErrorKind kind, const std::string& msg) { throw GraphError(kind, msg); }

void add_edge(std::vector<VertexMask>& adj, int u, int v) {
  adj[static_cast<std::size_t>(u)] |= bit(v);
  adj[static_cast<std::size_t>(v)] |= bit(u);
}

}  // namespace

bool is_connected(std::span<const VertexMask> adj) {
  const int n = static_cast<int>(adj.size());
  if (n == 0) return true;
  VertexMask seen = bit(0);
  VertexMask frontier = bit(0);
  while (frontier != 0) {
    VertexMask next = 0;
    for (VertexMask f = frontier; f != 0; f &= f - 1) next |= adj[static_cast<std::size_t>(std::countr_zero(f))];
    frontier = next & ~seen;
    seen |= next;
  }
  return seen == low_mask(n);
}

void validate_adjacency(std::span<const VertexMask> adj, int k_sys, bool require_connected) {
  const int n = static_cast<int>(adj.size());
  if (n < 2 || n > kMaxVertices) fail(GraphErrorKind::kVertexRange, "vertex count must lie in 2..64, got " + std::to_string(n));
  if (k_sys < 1 || k_sys >= n)
    fail(GraphErrorKind::kPartition, "k_sys must lie in 1..n-1, got k_sys=" + std::to_string(k_sys) + " n=" + std::to_string(n));
  for (int v = 0; v < n; ++v) {
    VertexMask row = adj[static_cast<std::size_t>(v)];
    if (row & ~low_mask(n)) fail(GraphErrorKind::kVertexRange, "adjacency row " + std::to_string(v) + " references a vertex >= n");
    if (test_bit(row, v)) fail(GraphErrorKind::kSelfLoop, "self-loop at vertex " + std::to_string(v));
    for (VertexMask r = row; r != 0; r &= r - 1) {
      int u = std::countr_zero(r);
      if (!test_bit(adj[static_cast<std::size_t>(u)], v))
        fail(GraphErrorKind::kNonSymmetric, "adjacency not symmetric at (" + std::to_string(v) + "," + std::to_string(u) + ")");
    }
  }
  if (require_connected && !is_connected(adj)) fail(GraphErrorKind::kDisconnected, "graph is not connected");
}

CodeGraph::CodeGraph(int k_sys, std::vector<VertexMask> adjacency) : k_sys_(k_sys), adj_(std::move(adjacency)) {
  validate_adjacency(adj_, k_sys_, true);
}

CodeGraph CodeGraph::from_edges(int n, int k_sys, std::span<const Edge> edges) {
  if (n < 2 || n > kMaxVertices) fail(GraphErrorKind::kVertexRange, "vertex count must lie in 2..64, got " + std::to_string(n));
  std::vector<VertexMask> adj(static_cast<std::size_t>(n), 0);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      fail(GraphErrorKind::kVertexRange, "edge [" + std::to_string(i) + "," + std::to_string(j) + "] outside 0..n-1");
    if (i == j) fail(GraphErrorKind::kSelfLoop, "self-loop at vertex " + std::to_string(i));
    if (i > j) fail(GraphErrorKind::kNonSymmetric, "edge [" + std::to_string(i) + "," + std::to_string(j) + "] not listed as i<j");
    if (test_bit(adj[static_cast<std::size_t>(i)], j))
      fail(GraphErrorKind::kNonSymmetric, "edge [" + std::to_string(i) + "," + std::to_string(j) + "] listed twice");
    add_edge(adj, i, j);
  }
  return CodeGraph(k_sys, std::move(adj));
}

VertexMask CodeGraph::multiply(VertexMask x) const {
  VertexMask out = 0;
  for (; x != 0; x &= x - 1) out ^= adj_[static_cast<std::size_t>(std::countr_zero(x))];
  return out;
}

std::vector<VertexMask> CodeGraph::system_env_block() const {
  std::vector<VertexMask> rows(static_cast<std::size_t>(k_sys_));
  for (int i = 0; i < k_sys_; ++i) rows[static_cast<std::size_t>(i)] = (adj_[static_cast<std::size_t>(i)] & env_mask()) >> k_sys_;
  return rows;
}

VertexMask CodeGraph::env_to_system(VertexMask b) const {
  return multiply(b << k_sys_) & system_mask();
}

bool CodeGraph::has_env_edges() const {
  for (int v = k_sys_; v < n(); ++v)
    if (adj_[static_cast<std::size_t>(v)] & env_mask()) return true;
  return false;
}

std::vector<Edge> CodeGraph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < n(); ++i)
    for (VertexMask r = adj_[static_cast<std::size_t>(i)] & ~low_mask(i + 1); r != 0; r &= r - 1)
      out.emplace_back(i, std::countr_zero(r));
  return out;
}

CodeGraph repetition_graph(int k) {
  if (k < 2) throw DomainError("repetition_graph needs k >= 2");
  if (k + 1 > kMaxVertices) throw DomainError("repetition_graph supports at most 63 system vertices");
  std::vector<VertexMask> adj(static_cast<std::size_t>(k + 1), 0);
  for (int v = 1; v <= k; ++v) add_edge(adj, 0, v);
  return CodeGraph(k, std::move(adj));
}

// Vertex order: A (n1), B (n2-1), leaf sets C^1..C^{n2-1} (n1-1 each), v_R last.
// v_R is joined to A only, A is complete to B, and b^i carries its leaves C^i.
CodeGraph cat_graph(int n1, int n2) {
  if (n1 < 1 || n2 < 2) throw DomainError("cat_graph needs n1 >= 1 and n2 >= 2");
  const int k = n1 * n2;
  if (k + 1 > kMaxVertices) throw DomainError("cat_graph supports at most 63 system vertices");
  std::vector<VertexMask> adj(static_cast<std::size_t>(k + 1), 0);
  const int env = k;
  const int b0 = n1;
  const int c0 = n1 + (n2 - 1);
  for (int a = 0; a < n1; ++a) {
    add_edge(adj, a, env);
    for (int b = 0; b < n2 - 1; ++b) add_edge(adj, a, b0 + b);
  }
  for (int b = 0; b < n2 - 1; ++b)
    for (int c = 0; c < n1 - 1; ++c) add_edge(adj, b0 + b, c0 + b * (n1 - 1) + c);
  return CodeGraph(k, std::move(adj));
}

// Vertex order: root, branch vertices, leaves grouped by branch, environment last.
CodeGraph tree_graph(std::span<const int> counts) {
  if (counts.empty()) throw DomainError("tree_graph needs at least one branch");
  int k = 1 + static_cast<int>(counts.size());
  for (int c : counts) {
    if (c < 0) throw DomainError("tree_graph leaf counts must be nonnegative");
    k += c;
  }
  if (k + 1 > kMaxVertices) throw DomainError("tree_graph supports at most 63 system vertices");
  std::vector<VertexMask> adj(static_cast<std::size_t>(k + 1), 0);
  add_edge(adj, 0, k);
  int next_leaf = 1 + static_cast<int>(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b) {
    int bv = 1 + static_cast<int>(b);
    add_edge(adj, 0, bv);
    for (int c = 0; c < counts[b]; ++c) add_edge(adj, bv, next_leaf++);
  }
  return CodeGraph(k, std::move(adj));
}

CodeGraph shor_graph() {
  static const char* rows[10] = {"0001001001", "0001001001", "0001001001", "1110110000", "0001000000",
                                 "0001000000", "1110000110", "0000001000", "0000001000", "1110000000"};
  std::vector<VertexMask> adj(10, 0);
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j)
      if (rows[i - 1][j - 1] == '1') adj[static_cast<std::size_t>(from_one_indexed(i))] |= bit(from_one_indexed(j));
  return CodeGraph(9, std::move(adj));
}

CodeGraph local_complement(const CodeGraph& g, int v) {
  if (v < 0 || v >= g.n()) throw DomainError("local_complement vertex out of range");
  std::vector<VertexMask> adj(g.adjacency().begin(), g.adjacency().end());
  const VertexMask nb = g.neighbors(v);
  for (VertexMask r = nb; r != 0; r &= r - 1) {
    int u = std::countr_zero(r);
    adj[static_cast<std::size_t>(u)] ^= nb & ~bit(u);
  }
  return CodeGraph(g.k_sys(), std::move(adj));
}

CodeGraph relabel(const CodeGraph& g, std::span<const int> perm) {
  const int n = g.n();
  if (static_cast<int>(perm.size()) != n) throw DomainError("relabel permutation has wrong length");
  std::vector<VertexMask> adj(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    if ((v < g.k_sys()) != (perm[static_cast<std::size_t>(v)] < g.k_sys()))
      throw DomainError("relabel must map system vertices to system vertices");
    for (VertexMask r = g.neighbors(v); r != 0; r &= r - 1)
      adj[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] |= bit(perm[static_cast<std::size_t>(std::countr_zero(r))]);
  }
  return CodeGraph(g.k_sys(), std::move(adj));
}

std::string graph_to_json(const CodeGraph& g) {
  nlohmann::ordered_json j;
  j["n"] = g.n();
  j["k_sys"] = g.k_sys();
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  return j.dump() + "\n";
}

CodeGraph graph_from_json(const std::string& text, LoadOptions opts) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(GraphErrorKind::kMalformed, std::string("malformed graph JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("k_sys") || !j.contains("edges") ||
      !j["n"].is_number_integer() || !j["k_sys"].is_number_integer() || !j["edges"].is_array())
    fail(GraphErrorKind::kMalformed, "graph JSON needs integer fields n, k_sys and an edges array");
  const int n = j["n"].get<int>();
  const int k = j["k_sys"].get<int>();
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      fail(GraphErrorKind::kMalformed, "each edge must be a pair of integers");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  CodeGraph g = CodeGraph::from_edges(n, k, edges);
  if (opts.reject_env_edges && g.has_env_edges())
    fail(GraphErrorKind::kEnvEdge, "environment-environment edges are not allowed here");
  return g;
}

CodeGraph load_graph(const std::filesystem::path& path, LoadOptions opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(GraphErrorKind::kMalformed, "cannot open graph file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return graph_from_json(ss.str(), opts);
}

void save_graph(const CodeGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write graph file " + path.string());
  out << graph_to_json(g);
}

}  // namespace gsci
