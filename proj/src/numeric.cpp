#include "gsci/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "gsci/errors.hpp"

namespace gsci {

std::string to_decimal(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

u128 parse_u128(std::string_view s) {
  if (s.empty()) throw FormatError("empty integer literal");
  u128 v = 0;
  const u128 max = ~u128{0};
  for (char c : s) {
    if (c < '0' || c > '9') throw FormatError("invalid integer literal '" + std::string(s) + "'");
    unsigned d = static_cast<unsigned>(c - '0');
    if (v > (max - d) / 10) throw FormatError("integer literal out of range '" + std::string(s) + "'");
    v = v * 10 + d;
  }
  return v;
}

u128 to_u128(const BigInt& v) {
  if (v < 0 || boost::multiprecision::msb(v) >= 128)
    throw ResourceError("integer exceeds 128 bits: " + v.str());
  u128 out = 0;
  BigInt t = v;
  for (int shift = 0; t != 0 && shift < 128; shift += 32) {
    out |= static_cast<u128>(static_cast<std::uint32_t>(t & 0xffffffffu)) << shift;
    t >>= 32;
  }
  return out;
}

BigInt to_bigint(u128 v) {
  BigInt hi = static_cast<std::uint64_t>(v >> 64);
  return (hi << 64) | BigInt(static_cast<std::uint64_t>(v));
}

double to_double(u128 v) {
  return static_cast<double>(static_cast<std::uint64_t>(v >> 64)) * 0x1p64 +
         static_cast<double>(static_cast<std::uint64_t>(v));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

u128 checked_add(u128 a, u128 b) {
  u128 r = a + b;
  if (r < a) throw ResourceError("128-bit coefficient overflow");
  return r;
}

u128 checked_mul(u128 a, u128 b) {
  u128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("128-bit coefficient overflow");
  return r;
}

}  // namespace gsci
