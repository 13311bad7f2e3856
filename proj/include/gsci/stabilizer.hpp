#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gsci/bits.hpp"
#include "gsci/errors.hpp"
#include "gsci/graphs.hpp"

namespace gsci {

enum class StabilizerErrorKind { kEmpty, kRagged, kIllegalChar, kAnticommuting, kDependent, kRankDeficient };

class StabilizerError : public FormatError {
 public:
  StabilizerError(StabilizerErrorKind kind, const std::string& msg) : FormatError(msg), kind_(kind) {}
  StabilizerErrorKind kind() const { return kind_; }

 private:
  StabilizerErrorKind kind_;
};

// One Pauli operator in binary symplectic form; qubit j is bit j of both parts.
struct PauliRow {
  VertexMask x = 0;
  VertexMask z = 0;
  friend bool operator==(const PauliRow&, const PauliRow&) = default;
};

inline bool commute(const PauliRow& a, const PauliRow& b) {
  return parity((a.x & b.z) ^ (a.z & b.x)) == 0;
}

struct GeneratorMatrix {
  int n = 0;
  std::vector<PauliRow> rows;
  friend bool operator==(const GeneratorMatrix&, const GeneratorMatrix&) = default;
};

GeneratorMatrix parse_stabilizers(std::span<const std::string> lines);
GeneratorMatrix read_stabilizer_file(const std::filesystem::path& path);
std::string to_pauli_string(const PauliRow& row, int n);
int gf2_rank(std::span<const PauliRow> rows);

struct CanonicalForm {
  GeneratorMatrix matrix;
  int k = 0;                     // size of the identity block in the X part
  std::vector<int> qubit_order;  // qubit_order[new position] = original qubit
};

// Shape (I_k A | B 0 ; 0 0 | A^T I_{n-k}).
CanonicalForm canonical_form(const GeneratorMatrix& m);

struct GraphConversion {
  std::vector<VertexMask> adjacency;  // in the canonical labeling
  std::vector<int> qubit_order;       // canonical position -> original qubit
  std::vector<int> hadamards;         // canonical positions receiving H
  std::vector<int> phase_gates;       // canonical positions receiving S
};

GraphConversion to_graph_state(const GeneratorMatrix& m);

// Graph in the original qubit labels, reordered so that `env_qubits` come last
// (each group keeps its original relative order).
CodeGraph graph_from_stabilizers(const GeneratorMatrix& m, std::span<const int> env_qubits);

}  // namespace gsci
