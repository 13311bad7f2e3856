#include <cmath>
#include <random>

#include "doctest.h"

#include "gsci/channels.hpp"
#include "gsci/errors.hpp"
#include "../support.hpp"

using namespace gsci;

namespace {

double h2(double x) { return x <= 0 || x >= 1 ? 0.0 : -x * std::log2(x) - (1 - x) * std::log2(1 - x); }

}  // namespace

TEST_CASE("ray_at follows the x parametrization") {
  auto d = RayDirection::depolarizing();
  auto p = ray_at(d, 0.0);
  CHECK(p.p0() == 1.0);
  CHECK(p.p(1) == 0.0);
  p = ray_at(d, 0.3);
  CHECK(p.p0() == doctest::Approx(0.7).epsilon(1e-15));
  for (int i = 1; i <= 3; ++i) CHECK(p.p(i) == doctest::Approx(0.1).epsilon(1e-15));
  p = ray_at(RayDirection(0, 0, 1), 0.5);
  CHECK(p.p0() == 0.5);
  CHECK(p.p(3) == 0.5);
  CHECK_THROWS_AS(ray_at(d, 1.5), DomainError);
  CHECK_THROWS_AS(ray_at(d, -0.1), DomainError);
}

TEST_CASE("PauliParams validation") {
  CHECK_THROWS_AS(PauliParams(0.5, 0.5, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(PauliParams(1.1, -0.1, 0.0, 0.0), DomainError);
  PauliParams nearly(0.7, 0.1, 0.1, 0.1 + 1e-14);
  CHECK(nearly.p0() + nearly.p(1) + nearly.p(2) + nearly.p(3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(PauliParams(0.0, 1.0, 0.0, 0.0).q(1), DomainError);
  CHECK(PauliParams(0.5, 0.25, 0.25, 0.0).q(1) == 0.5);
  CHECK_THROWS_AS(RayDirection(0.5, 0.6, 0.0), DomainError);
}

TEST_CASE("shannon_entropy examples") {
  CHECK(shannon_entropy(std::vector<double>{1, 0, 0, 0}) == 0.0);
  CHECK(shannon_entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(shannon_entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(shannon_entropy(std::vector<double>{1.5, -0.5}), DomainError);
  CHECK(shannon_entropy(std::vector<double>{1.0, 1e-320}) == 0.0);
}

TEST_CASE("hashing_ci examples") {
  CHECK(hashing_ci(PauliParams::noiseless()) == 1.0);
  CHECK(hashing_ci(PauliParams(0.25, 0.25, 0.25, 0.25)) == doctest::Approx(-1.0).epsilon(1e-15));
  const double t = 0.1 / 3;
  const double expected = 1 - h2(0.1) - 0.1 * std::log2(3.0);
  CHECK(hashing_ci(PauliParams(0.9, t, t, t)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.37251).epsilon(1e-5));
  CHECK(hashing_ci(PauliParams(0.7, 0.1, 0.1, 0.1)) == doctest::Approx(-0.35678).epsilon(1e-5));
}

TEST_CASE("single-letter threshold agrees with a dense scan of its scalar equation") {
  CHECK(single_letter_threshold(RayDirection(0, 0, 1)) == 0.5);
  CHECK(single_letter_threshold(RayDirection(1, 0, 0)) == 0.5);
  auto scan_root = [](auto f) {
    const int n = 1'000'000;
    double last = 0;
    for (int i = 0; i <= n; ++i) {
      double x = 0.5 * i / n;
      if (f(x) > 0) last = x;
    }
    return last;
  };
  const double dep = scan_root([](double x) { return 1 - h2(x) - x * std::log2(3.0); });
  CHECK(std::abs(single_letter_threshold(RayDirection::depolarizing()) - dep) <= 0x1p-20 + 0.5 / 1e6);
  CHECK(dep == doctest::Approx(0.18929).epsilon(1e-4));
  const double half = scan_root([](double x) { return 1 - h2(x) - x; });
  CHECK(std::abs(single_letter_threshold(RayDirection(0.5, 0, 0.5)) - half) <= 0x1p-20 + 0.5 / 1e6);
}

TEST_CASE("single-letter threshold lies in (0, 0.5] and reaches 0.5 only for dephasing directions") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto d = testing::random_direction(rng);
    double t = single_letter_threshold(d);
    CHECK(t > 0.0);
    CHECK(t < 0.5 - 0x1p-20);
  }
  for (auto d : {RayDirection(1, 0, 0), RayDirection(0, 1, 0), RayDirection(0, 0, 1)})
    CHECK(single_letter_threshold(d) == 0.5);
}

TEST_CASE("is_antidegradable examples and the x = 1/2 property") {
  CHECK_FALSE(is_antidegradable(PauliParams::noiseless()));
  CHECK(is_antidegradable(PauliParams(0.5, 0.5 / 3, 0.5 / 3, 1 - 0.5 - 1.0 / 3)));
  CHECK(is_antidegradable(PauliParams(0.7, 0.1, 0.1, 0.1)));
  CHECK_FALSE(is_antidegradable(PauliParams(0.9, 0.1, 0.0, 0.0)));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) REQUIRE(is_antidegradable(ray_at(testing::random_direction(rng), 0.5)));
}

TEST_CASE("hashing_ci decreases strictly along rays") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    auto d = testing::random_direction(rng);
    double prev = hashing_ci(ray_at(d, 0));
    for (int j = 1; j < 64; ++j) {
      double v = hashing_ci(ray_at(d, 0.5 * j / 63));
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("channel text parsing") {
  auto p = parse_pauli_params("0.7,0.1,0.1,0.1");
  CHECK(p.p(2) == doctest::Approx(0.1).epsilon(1e-15));
  auto d = parse_direction("0.3333333333,0.3333333333,0.3333333334");
  CHECK(d.d(3) == doctest::Approx(0.3333333334).epsilon(1e-15));
  CHECK_THROWS_AS(parse_pauli_params("0.7;0.1;0.1;0.1"), FormatError);
  CHECK_THROWS_AS(parse_pauli_params("0.7,0.1,0.1"), FormatError);
  CHECK_THROWS_AS(parse_direction("a,b,c"), FormatError);
  CHECK_THROWS_AS(parse_pauli_params("0.7,0.2,0.2,0.1"), DomainError);
}
