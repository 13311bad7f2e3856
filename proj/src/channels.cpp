#include "gsci/channels.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "gsci/errors.hpp"
#include "gsci/numeric.hpp"

namespace gsci {
namespace {

template <std::size_t N>
std::array<double, N> validated(std::array<double, N> v, const char* what) {
  double sum = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0)
      throw DomainError(std::string(what) + ": components must be finite and nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance)
    throw DomainError(std::string(what) + ": components sum to " + format_double(sum) + ", not 1");
  if (sum != 1.0)
    for (double& x : v) x /= sum;
  return v;
}

std::vector<double> parse_list(std::string_view text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = text.find(',', pos);
    std::string_view tok = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw FormatError(std::string(what) + ": cannot parse number '" + std::string(tok) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.size() != expected)
    throw FormatError(std::string(what) + ": expected " + std::to_string(expected) + " comma-separated values");
  return out;
}

}  // namespace

PauliParams::PauliParams(double p0, double p1, double p2, double p3)
    : p_(validated<4>({p0, p1, p2, p3}, "Pauli parameters")) {}

double PauliParams::q(int i) const {
  if (p_[0] <= 0.0) throw DomainError("q ratios undefined at p0 = 0");
  return p_[i] / p_[0];
}

RayDirection::RayDirection(double d1, double d2, double d3)
    : d_(validated<3>({d1, d2, d3}, "ray direction")) {}

PauliParams RayDirection::at(double x) const { return ray_at(*this, x); }

PauliParams ray_at(const RayDirection& d, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("ray parameter x must lie in [0,1]");
  return {1.0 - x, x * d.d(1), x * d.d(2), x * d.d(3)};
}

double shannon_entropy(std::span<const double> weights) {
  KahanSum total;
  KahanSum h;
  for (double w : weights) {
    if (w < 0.0 || std::isnan(w)) throw DomainError("negative weight in entropy");
    total.add(w);
    h.add(entropy_term(w));
  }
  if (std::abs(total.value() - 1.0) > 1e-9) throw DomainError("entropy weights do not sum to 1");
  return h.value();
}

double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) throw DomainError("binary entropy argument outside [0,1]");
  return entropy_term(x) + entropy_term(1.0 - x);
}

double hashing_ci(const PauliParams& p) { return 1.0 - shannon_entropy(p.probs()); }

double single_letter_threshold(const RayDirection& d, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double hd = shannon_entropy(d.components());
  auto f = [hd](double x) {
    const double h = binary_entropy(x) + x * hd;
    return 1.0 - h - kCiResolution * (2.0 + h);
  };
  if (f(0.5 - eps) > 0.0) return 0.5;
  double lo = 0.0;
  double hi = 0.5;
  while (hi - lo > eps) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool is_antidegradable(const PauliParams& p) {
  const auto& v = p.probs();
  double sq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
  return 1.0 >= 2.0 * sq - 8.0 * std::sqrt(v[0] * v[1] * v[2] * v[3]);
}

PauliParams parse_pauli_params(std::string_view text) {
  auto v = parse_list(text, 4, "Pauli parameters");
  return {v[0], v[1], v[2], v[3]};
}

RayDirection parse_direction(std::string_view text) {
  auto v = parse_list(text, 3, "direction");
  return {v[0], v[1], v[2]};
}

}  // namespace gsci
