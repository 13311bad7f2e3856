#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace gsci {

using BigInt = boost::multiprecision::cpp_int;
using u128 = unsigned __int128;

// Compensated summation.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Values below this are exact zeros for entropy purposes.
inline constexpr double kEntropyFloor = 1e-300;

// -v log2 v with the 0 log 0 = 0 convention.
inline double entropy_term(double v) {
  return v < kEntropyFloor ? 0.0 : -v * std::log2(v);
}

std::string to_decimal(u128 v);
u128 parse_u128(std::string_view s);  // throws FormatError
u128 to_u128(const BigInt& v);        // throws ResourceError on overflow
BigInt to_bigint(u128 v);
double to_double(u128 v);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Checked arithmetic on u128; throw ResourceError on overflow.
u128 checked_add(u128 a, u128 b);
u128 checked_mul(u128 a, u128 b);

}  // namespace gsci
