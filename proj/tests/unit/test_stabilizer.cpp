#include <random>
#include <set>

#include "doctest.h"

#include "gsci/directci.hpp"
#include "gsci/permgroup.hpp"
#include "gsci/stabilizer.hpp"
#include "../support.hpp"

using namespace gsci;

namespace {

StabilizerErrorKind parse_error(std::vector<std::string> lines) {
  try {
    parse_stabilizers(lines);
  } catch (const StabilizerError& e) {
    return e.kind();
  }
  FAIL("stabilizers accepted");
  return StabilizerErrorKind::kEmpty;
}

// Rows X_v Z_{N(v)} of a graph state.
GeneratorMatrix graph_generators(std::span<const VertexMask> adj) {
  GeneratorMatrix m;
  m.n = static_cast<int>(adj.size());
  for (int v = 0; v < m.n; ++v) m.rows.push_back({bit(v), adj[v]});
  return m;
}

// GF(2) span of the rows, each element packed as x | z << n.
std::set<unsigned __int128> row_span(const GeneratorMatrix& m) {
  std::set<unsigned __int128> out;
  const std::size_t r = m.rows.size();
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << r); ++s) {
    VertexMask x = 0, z = 0;
    for (std::size_t i = 0; i < r; ++i)
      if ((s >> i) & 1) {
        x ^= m.rows[i].x;
        z ^= m.rows[i].z;
      }
    out.insert(static_cast<unsigned __int128>(x) | (static_cast<unsigned __int128>(z) << m.n));
  }
  return out;
}

// Conjugates each row by the recorded local Cliffords: H swaps x and z, S adds x to z.
GeneratorMatrix apply_local_ops(const GeneratorMatrix& m, const GraphConversion& c) {
  GeneratorMatrix out;
  out.n = m.n;
  for (const auto& row : m.rows) {
    PauliRow permuted;
    for (int pos = 0; pos < m.n; ++pos) {
      const int q = c.qubit_order[pos];
      if (test_bit(row.x, q)) permuted.x |= bit(pos);
      if (test_bit(row.z, q)) permuted.z |= bit(pos);
    }
    for (int h : c.hadamards) {
      const bool x = test_bit(permuted.x, h), z = test_bit(permuted.z, h);
      permuted.x = (permuted.x & ~bit(h)) | (z ? bit(h) : 0);
      permuted.z = (permuted.z & ~bit(h)) | (x ? bit(h) : 0);
    }
    for (int s : c.phase_gates)
      if (test_bit(permuted.x, s)) permuted.z ^= bit(s);
    out.rows.push_back(permuted);
  }
  return out;
}

}  // namespace

TEST_CASE("Pauli strings map to binary symplectic rows") {
  auto m = parse_stabilizers(std::vector<std::string>{"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"});
  CHECK(m.n == 5);
  CHECK(m.rows[0].x == 0b01001);
  CHECK(m.rows[0].z == 0b00110);
  CHECK(to_pauli_string(m.rows[0], 5) == "XZZXI");
  auto y = parse_stabilizers(std::vector<std::string>{"-Y", "  # only a comment"});
  CHECK(y.rows[0].x == 1);
  CHECK(y.rows[0].z == 1);
}

TEST_CASE("stabilizer diagnostics") {
  CHECK(parse_error({"XX", "ZZ", "XXX"}) == StabilizerErrorKind::kRagged);
  CHECK(parse_error({"XA"}) == StabilizerErrorKind::kIllegalChar);
  CHECK(parse_error({"XI", "ZI"}) == StabilizerErrorKind::kAnticommuting);
  CHECK(parse_error({"XX", "XX"}) == StabilizerErrorKind::kDependent);
  CHECK(parse_error({"# nothing"}) == StabilizerErrorKind::kEmpty);
  auto under = parse_stabilizers(std::vector<std::string>{"XX"});
  CHECK_THROWS_AS(canonical_form(under), StabilizerError);
}

TEST_CASE("Bell pair converts to a single edge") {
  auto m = parse_stabilizers(std::vector<std::string>{"XX", "ZZ"});
  auto cf = canonical_form(m);
  CHECK(cf.k == 1);
  auto g = graph_from_stabilizers(m, std::vector<int>{1});
  CHECK(g == CodeGraph::from_edges(2, 1, std::vector<Edge>{{0, 1}}));
}

TEST_CASE("graph-state generators are a fixpoint") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    auto g = testing::random_code(rng, 6, 4);
    auto m = graph_generators(g.adjacency());
    auto cf = canonical_form(m);
    CHECK(cf.k == 6);
    CHECK(cf.matrix == m);
    auto conv = to_graph_state(m);
    CHECK(conv.adjacency == std::vector<VertexMask>(g.adjacency().begin(), g.adjacency().end()));
    CHECK(conv.hadamards.empty());
    CHECK(conv.phase_gates.empty());
  }
}

TEST_CASE("row order does not change the canonical form") {
  auto a = parse_stabilizers(std::vector<std::string>{"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ", "XXXXX"});
  auto b = parse_stabilizers(std::vector<std::string>{"XXXXX", "ZXIXZ", "IXZZX", "XZZXI", "XIXZZ"});
  CHECK(canonical_form(a).matrix == canonical_form(b).matrix);
  CHECK(to_graph_state(a).adjacency == to_graph_state(b).adjacency);
}

TEST_CASE("local Cliffords map the input group onto the graph-state group") {
  std::mt19937_64 rng(23);
  const char letters[] = "IXYZ";
  int checked = 0;
  for (int n = 1; n <= 4; ++n)
    for (int attempt = 0; attempt < 400 && checked < 200; ++attempt) {
      // random stabilizer state: a graph state under random local Pauli-frame changes
      auto adj = testing::random_adjacency(rng, n);
      std::vector<std::string> lines;
      GeneratorMatrix base = graph_generators(adj);
      std::vector<int> frame(n);
      for (int q = 0; q < n; ++q) frame[q] = static_cast<int>(rng() % 6);
      for (auto row : base.rows) {
        std::string s;
        for (int q = 0; q < n; ++q) {
          int x = test_bit(row.x, q), z = test_bit(row.z, q);
          switch (frame[q]) {  // the six single-qubit Clifford classes on (x, z)
            case 1: std::swap(x, z); break;
            case 2: z ^= x; break;
            case 3: x ^= z; break;
            case 4: { int t = x; x = z; z ^= t; } break;
            case 5: { int t = z; z = x; x ^= t; } break;
            default: break;
          }
          s.push_back(letters[x + 2 * z == 0 ? 0 : (x && !z ? 1 : (x && z ? 2 : 3))]);
        }
        lines.push_back(s);
      }
      auto m = parse_stabilizers(lines);
      auto conv = to_graph_state(m);
      const auto expected = row_span(graph_generators(conv.adjacency));
      CHECK(row_span(apply_local_ops(m, conv)) == expected);
      for (int v = 0; v < n; ++v) CHECK_FALSE(test_bit(conv.adjacency[v], v));
      ++checked;
    }
  CHECK(checked > 100);
}

TEST_CASE("purified Shor code converts to the 3-in-3 cat graph") {
  // reference qubit first, then the nine code qubits
  auto m = parse_stabilizers(std::vector<std::string>{
      "IZZIIIIIII", "IZIZIIIIII", "IIIIZZIIII", "IIIIZIZIII", "IIIIIIIZZI", "IIIIIIIZIZ", "IXXXXXXIII",
      "IXXXIIIXXX", "XXXXXXXXXX", "ZZZZZZZZZZ"});
  auto g = graph_from_stabilizers(m, std::vector<int>{0});
  CHECK(g.k_sys() == 9);
  CHECK(isomorphic(g, shor_graph()));
  const auto p = RayDirection::depolarizing().at(0.1);
  CHECK(std::abs(direct_ci(g, p) - direct_ci(shor_graph(), p)) <= 1e-10);

  // reference qubit last: earliest pivots land elsewhere and give an LC-equivalent tree
  auto m2 = parse_stabilizers(std::vector<std::string>{
      "ZZIIIIIIII", "ZIZIIIIIII", "IIIZZIIIII", "IIIZIZIIII", "IIIIIIZZII", "IIIIIIZIZI", "XXXXXXIIII",
      "XXXIIIXXXI", "XXXXXXXXXX", "ZZZZZZZZZZ"});
  auto g2 = graph_from_stabilizers(m2, std::vector<int>{9});
  const auto spider = CodeGraph::from_edges(
      10, 9, std::vector<Edge>{{0, 1}, {0, 2}, {0, 9}, {3, 4}, {3, 5}, {3, 9}, {6, 7}, {6, 8}, {6, 9}});
  CHECK(isomorphic(g2, spider));
  CHECK_FALSE(isomorphic(g2, shor_graph()));
  CHECK(std::abs(direct_ci(g2, p) - direct_ci(shor_graph(), p)) <= 1e-10);
}
