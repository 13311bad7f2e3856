#pragma once

#include <array>
#include <span>
#include <string_view>

namespace gsci {

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kDefaultEps = 0x1p-20;
// Relative rounding floor for the sign of a CI: a value within
// kCiResolution * (1 + H_RB + H_B) / k of zero counts as non-positive. Large enough that
// CI changes across +-2 eps at the crossing exceed entropy rounding noise, small enough
// that 1 - h(x) at x = 1/2 - 2^-20 stays above it.
inline constexpr double kCiResolution = 0x1p-41;

// Pauli channel p0 I + p1 X + p2 Y + p3 Z.
class PauliParams {
 public:
  PauliParams(double p0, double p1, double p2, double p3);
  static PauliParams noiseless() { return {1.0, 0.0, 0.0, 0.0}; }

  double p(int i) const { return p_[i]; }
  double p0() const { return p_[0]; }
  const std::array<double, 4>& probs() const { return p_; }
  // q_i = p_i / p0; requires p0 > 0.
  double q(int i) const;

 private:
  std::array<double, 4> p_;
};

// Direction (d1, d2, d3) of a ray through the simplex from the noiseless point.
class RayDirection {
 public:
  RayDirection(double d1, double d2, double d3);
  static RayDirection depolarizing() { return {1.0 / 3, 1.0 / 3, 1.0 / 3}; }

  double d(int i) const { return d_[i - 1]; }
  const std::array<double, 3>& components() const { return d_; }
  PauliParams at(double x) const;

 private:
  std::array<double, 3> d_;
};

PauliParams ray_at(const RayDirection& d, double x);

double shannon_entropy(std::span<const double> weights);
double binary_entropy(double x);
double hashing_ci(const PauliParams& p);
// Bisects on the hashing bound minus its rounding floor (H_B = 1, H_RB = H(p)).
double single_letter_threshold(const RayDirection& d, double eps = kDefaultEps);
bool is_antidegradable(const PauliParams& p);

PauliParams parse_pauli_params(std::string_view text);
RayDirection parse_direction(std::string_view text);

}  // namespace gsci
