#include "gsci/stabilizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace gsci {
namespace {

[[noreturn]] void fail(StabilizerErrorKind kind, const std::string& msg) { throw StabilizerError(kind, msg); }

void swap_qubits(GeneratorMatrix& m, std::vector<int>& order, int a, int b) {
  if (a == b) return;
  auto swap_bits = [a, b](VertexMask& v) {
    if (test_bit(v, a) != test_bit(v, b)) v ^= bit(a) | bit(b);
  };
  for (auto& r : m.rows) {
    swap_bits(r.x);
    swap_bits(r.z);
  }
  std::swap(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
}

void add_row(PauliRow& dst, const PauliRow& src) {
  dst.x ^= src.x;
  dst.z ^= src.z;
}

}  // namespace

int gf2_rank(std::span<const PauliRow> rows) {
  std::vector<PauliRow> m(rows.begin(), rows.end());
  int rank = 0;
  for (int col = 0; col < 2 * kMaxVertices && rank < static_cast<int>(m.size()); ++col) {
    auto has = [col](const PauliRow& r) { return col < 64 ? test_bit(r.x, col) : test_bit(r.z, col - 64); };
    auto piv = std::find_if(m.begin() + rank, m.end(), has);
    if (piv == m.end()) continue;
    std::iter_swap(m.begin() + rank, piv);
    for (std::size_t r = 0; r < m.size(); ++r)
      if (static_cast<int>(r) != rank && has(m[r])) add_row(m[r], m[static_cast<std::size_t>(rank)]);
    ++rank;
  }
  return rank;
}

GeneratorMatrix parse_stabilizers(std::span<const std::string> lines) {
  GeneratorMatrix m;
  int width = -1;
  for (const std::string& raw : lines) {
    std::string s = raw.substr(0, raw.find('#'));
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) continue;
    if (s[0] == '+' || s[0] == '-') s.erase(0, 1);
    if (width < 0) width = static_cast<int>(s.size());
    if (static_cast<int>(s.size()) != width)
      fail(StabilizerErrorKind::kRagged, "stabilizer '" + s + "' has length " + std::to_string(s.size()) +
                                             ", expected " + std::to_string(width));
    if (width == 0 || width > kMaxVertices) fail(StabilizerErrorKind::kRagged, "stabilizer length must lie in 1..64");
    PauliRow row;
    for (int j = 0; j < width; ++j) {
      switch (s[static_cast<std::size_t>(j)]) {
        case 'I': break;
        case 'X': row.x |= bit(j); break;
        case 'Y': row.x |= bit(j); row.z |= bit(j); break;
        case 'Z': row.z |= bit(j); break;
        default:
          fail(StabilizerErrorKind::kIllegalChar, std::string("illegal Pauli letter '") + s[static_cast<std::size_t>(j)] +
                                                      "' in '" + s + "'");
      }
    }
    m.rows.push_back(row);
  }
  if (m.rows.empty()) fail(StabilizerErrorKind::kEmpty, "no stabilizers given");
  m.n = width;
  for (std::size_t a = 0; a < m.rows.size(); ++a)
    for (std::size_t b = a + 1; b < m.rows.size(); ++b)
      if (!commute(m.rows[a], m.rows[b]))
        fail(StabilizerErrorKind::kAnticommuting, "stabilizers " + std::to_string(a) + " and " + std::to_string(b) +
                                                      " anticommute");
  if (gf2_rank(m.rows) != static_cast<int>(m.rows.size()))
    fail(StabilizerErrorKind::kDependent, "stabilizers are linearly dependent");
  return m;
}

GeneratorMatrix read_stabilizer_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open stabilizer file " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return parse_stabilizers(lines);
}

std::string to_pauli_string(const PauliRow& row, int n) {
  std::string s;
  for (int j = 0; j < n; ++j) s.push_back("IXZY"[(test_bit(row.x, j) ? 1 : 0) + (test_bit(row.z, j) ? 2 : 0)]);
  return s;
}

CanonicalForm canonical_form(const GeneratorMatrix& input) {
  const int n = input.n;
  if (static_cast<int>(input.rows.size()) != n)
    fail(StabilizerErrorKind::kRankDeficient, "canonical form needs n = " + std::to_string(n) + " generators, got " +
                                                  std::to_string(input.rows.size()));
  CanonicalForm out;
  out.matrix = input;
  out.qubit_order.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.qubit_order[static_cast<std::size_t>(j)] = j;
  auto& rows = out.matrix.rows;

  // X block, left to right; a missing pivot pulls in the earliest later column that has one.
  int rank = 0;
  for (; rank < n; ++rank) {
    int pivot_row = -1;
    for (int col = rank; col < n && pivot_row < 0; ++col) {
      for (int r = rank; r < n; ++r)
        if (test_bit(rows[static_cast<std::size_t>(r)].x, col)) {
          pivot_row = r;
          swap_qubits(out.matrix, out.qubit_order, rank, col);
          break;
        }
    }
    if (pivot_row < 0) break;
    std::swap(rows[static_cast<std::size_t>(rank)], rows[static_cast<std::size_t>(pivot_row)]);
    for (int r = 0; r < n; ++r)
      if (r != rank && test_bit(rows[static_cast<std::size_t>(r)].x, rank))
        add_row(rows[static_cast<std::size_t>(r)], rows[static_cast<std::size_t>(rank)]);
  }
  out.k = rank;

  // Z block of the remaining rows on columns k..n-1; also clears those columns above.
  for (int t = rank; t < n; ++t) {
    int pivot_row = -1;
    for (int col = t; col < n && pivot_row < 0; ++col) {
      for (int r = t; r < n; ++r)
        if (test_bit(rows[static_cast<std::size_t>(r)].z, col)) {
          pivot_row = r;
          swap_qubits(out.matrix, out.qubit_order, t, col);
          break;
        }
    }
    if (pivot_row < 0) fail(StabilizerErrorKind::kRankDeficient, "generators do not determine a unique state");
    std::swap(rows[static_cast<std::size_t>(t)], rows[static_cast<std::size_t>(pivot_row)]);
    for (int r = 0; r < n; ++r)
      if (r != t && test_bit(rows[static_cast<std::size_t>(r)].z, t))
        add_row(rows[static_cast<std::size_t>(r)], rows[static_cast<std::size_t>(t)]);
  }
  return out;
}

GraphConversion to_graph_state(const GeneratorMatrix& m) {
  CanonicalForm cf = canonical_form(m);
  const int n = m.n;
  GraphConversion out;
  out.qubit_order = cf.qubit_order;
  auto& rows = cf.matrix.rows;
  for (int j = cf.k; j < n; ++j) {
    out.hadamards.push_back(j);
    for (auto& r : rows)
      if (test_bit(r.x, j) != test_bit(r.z, j)) {
        r.x ^= bit(j);
        r.z ^= bit(j);
      }
  }
  for (int j = 0; j < cf.k; ++j) {
    if (!test_bit(rows[static_cast<std::size_t>(j)].z, j)) continue;
    out.phase_gates.push_back(j);
    for (auto& r : rows)
      if (test_bit(r.x, j)) r.z ^= bit(j);
  }
  out.adjacency.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (rows[static_cast<std::size_t>(i)].x != bit(i)) throw ConsistencyError("X block is not the identity after conversion");
    out.adjacency[static_cast<std::size_t>(i)] = rows[static_cast<std::size_t>(i)].z;
  }
  for (int i = 0; i < n; ++i) {
    if (test_bit(out.adjacency[static_cast<std::size_t>(i)], i)) throw ConsistencyError("graph has a self-loop after conversion");
    for (int j = 0; j < n; ++j)
      if (test_bit(out.adjacency[static_cast<std::size_t>(i)], j) != test_bit(out.adjacency[static_cast<std::size_t>(j)], i))
        throw ConsistencyError("converted adjacency is not symmetric");
  }
  return out;
}

CodeGraph graph_from_stabilizers(const GeneratorMatrix& m, std::span<const int> env_qubits) {
  GraphConversion conv = to_graph_state(m);
  const int n = m.n;
  VertexMask env = 0;
  for (int q : env_qubits) {
    if (q < 0 || q >= n) throw DomainError("environment qubit out of range");
    env |= bit(q);
  }
  if (env == 0 || env == low_mask(n)) throw DomainError("need at least one system and one environment qubit");
  // new label of each original qubit: system qubits first, then environment, order kept
  std::vector<int> label(static_cast<std::size_t>(n));
  int next = 0;
  for (int q = 0; q < n; ++q)
    if (!test_bit(env, q)) label[static_cast<std::size_t>(q)] = next++;
  const int k = next;
  for (int q = 0; q < n; ++q)
    if (test_bit(env, q)) label[static_cast<std::size_t>(q)] = next++;
  std::vector<VertexMask> adj(static_cast<std::size_t>(n), 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (test_bit(conv.adjacency[static_cast<std::size_t>(a)], b))
        adj[static_cast<std::size_t>(label[static_cast<std::size_t>(conv.qubit_order[static_cast<std::size_t>(a)])])] |=
            bit(label[static_cast<std::size_t>(conv.qubit_order[static_cast<std::size_t>(b)])]);
  return CodeGraph(k, std::move(adj));
}

}  // namespace gsci
