#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace gsci {

// Vertex subsets are machine words: bit i of the integer is vertex i.
using VertexMask = std::uint64_t;
inline constexpr int kMaxVertices = 64;

constexpr VertexMask bit(int i) { return VertexMask{1} << i; }
constexpr VertexMask low_mask(int width) {
  return width >= 64 ? ~VertexMask{0} : (VertexMask{1} << width) - 1;
}
constexpr bool test_bit(VertexMask m, int i) { return (m >> i) & 1U; }
inline int popcount(VertexMask m) { return std::popcount(m); }
inline int parity(VertexMask m) { return std::popcount(m) & 1; }

// Subset given as 0/1 entries per vertex -> integer, vertex 0 least significant.
VertexMask binary_to_decimal(std::span<const std::uint8_t> column);
std::vector<std::uint8_t> decimal_to_binary(VertexMask value, int width);

// Lexicographic comparison of two bitstrings with position 0 most significant.
constexpr bool lex_greater(VertexMask a, VertexMask b) {
  VertexMask d = a ^ b;
  return d != 0 && (a & (d & (~d + 1))) != 0;
}

// Converts between the 1-indexed vertex labels used in printed matrices and
// permutations and the 0-indexed labels used everywhere in code.
constexpr int from_one_indexed(int v) { return v - 1; }
constexpr int to_one_indexed(int v) { return v + 1; }

}  // namespace gsci
