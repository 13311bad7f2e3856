#include "gsci/bits.hpp"

#include "gsci/errors.hpp"

namespace gsci {

VertexMask binary_to_decimal(std::span<const std::uint8_t> column) {
  if (column.size() > static_cast<std::size_t>(kMaxVertices))
    throw DomainError("binary column wider than 64 entries");
  VertexMask m = 0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (column[i] > 1) throw DomainError("binary column entry is not 0 or 1");
    if (column[i]) m |= bit(static_cast<int>(i));
  }
  return m;
}

std::vector<std::uint8_t> decimal_to_binary(VertexMask value, int width) {
  if (width < 0 || width > kMaxVertices) throw DomainError("width out of range");
  if ((value & ~low_mask(width)) != 0) throw DomainError("value has bits outside the width");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) out[static_cast<std::size_t>(i)] = test_bit(value, i) ? 1 : 0;
  return out;
}

}  // namespace gsci
