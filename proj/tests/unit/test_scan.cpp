#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"

#include "gsci/errors.hpp"
#include "gsci/permgroup.hpp"
#include "gsci/scan.hpp"
#include "../support.hpp"

using namespace gsci;

namespace {

CodeGraph single_letter() { return CodeGraph::from_edges(2, 1, std::vector<Edge>{{0, 1}}); }

}  // namespace

TEST_CASE("ray threshold on synthetic functions") {
  auto t = ray_threshold([](double x) { return 0.3 - x; });
  REQUIRE(t.has_value());
  CHECK(std::abs(*t - 0.3) <= kDefaultEps);
  CHECK_FALSE(ray_threshold([](double x) { return -x; }).has_value());
  CHECK(ray_threshold([](double) { return 1.0; }) == 0.5);
  CHECK_THROWS_AS(ray_threshold([](double x) { return std::cos(40 * x); }), ConsistencyError);
  CHECK_THROWS_AS(ray_threshold([](double x) { return 0.3 - x; }, 0.0), DomainError);
  auto g = sign_grid([](double x) { return 0.2 - x; });
  for (int j = 0; j < kSignGridPoints; ++j) CHECK(g[j] == (j / 32.0 < 0.2));
}

TEST_CASE("single-letter spectrum thresholds") {
  auto s = symmetric_lambda(single_letter());
  CHECK(threshold(s, RayDirection(0, 0, 1)) == 0.5);
  auto t = threshold(s, RayDirection::depolarizing());
  REQUIRE(t.has_value());
  CHECK(std::abs(*t - single_letter_threshold(RayDirection::depolarizing())) <= kDefaultEps);
}

TEST_CASE("thresholds pass post-verification and stay below 1/2") {
  auto s = symmetric_lambda(repetition_graph(3));
  SpectrumEvaluator ev(s);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    auto d = testing::random_direction(rng);
    auto t = threshold(ev, d);
    REQUIRE(t.has_value());
    CHECK(*t <= 0.5);
    if (*t < 0.5) {
      CHECK(ev.ci(d.at(*t - 2 * kDefaultEps)) > 0);
      CHECK(ev.ci(d.at(*t + 2 * kDefaultEps)) < 0);
    }
  }
}

TEST_CASE("spherical grid directions") {
  auto x = spherical_direction(std::numbers::pi / 2, 0);
  CHECK(x.components() == std::array<double, 3>{1, 0, 0});
  auto z = spherical_direction(0, 0);
  CHECK(z.components() == std::array<double, 3>{0, 0, 1});
  auto m = spherical_direction(std::acos(1 / std::sqrt(3.0)), std::numbers::pi / 4);
  for (double c : m.components()) CHECK(c == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("surface corners, ordering and determinism") {
  auto s = symmetric_lambda(repetition_graph(2));
  auto rows = surface(s, 2);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].theta == 0);
  CHECK(rows[1].theta == 0);
  CHECK(rows[1].phi == doctest::Approx(std::numbers::pi / 2));
  CHECK(rows[2].direction.components() == std::array<double, 3>{1, 0, 0});
  CHECK(rows[3].direction.components()[1] == doctest::Approx(1.0));
  for (const auto& r : rows) CHECK(r.direction.components()[2] >= 0);
  CHECK(rows[0].direction.components() == std::array<double, 3>{0, 0, 1});
  CHECK_THROWS_AS(surface(s, 1), DomainError);

  ScanOptions serial;
  serial.parallel = false;
  auto a = surface_csv(surface(s, 9));
  auto b = surface_csv(surface(s, 9, serial));
  CHECK(a == b);
  CHECK(a.rfind("theta,phi,p1,p2,p3,x_code,x_single,delta\n", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 82);
}

TEST_CASE("single-letter surface has zero delta everywhere") {
  for (const auto& r : surface(symmetric_lambda(single_letter()), 9)) {
    REQUIRE(r.delta.has_value());
    CHECK(*r.delta == 0.0);
  }
}

TEST_CASE("rate planes") {
  std::vector<CISpectrum> reps;
  for (int k = 2; k <= 7; ++k) reps.push_back(symmetric_lambda(repetition_graph(k)));
  auto nodes = rate_planes(reps, 1.0, 65);
  REQUIRE(nodes.size() == 65 * 65);
  REQUIRE(nodes[0].diff.has_value());
  CHECK(*nodes[0].diff == doctest::Approx(1.0 / 2 - 1).epsilon(1e-12));
  double best = -1;
  for (const auto& n : nodes) {
    if (n.diff) best = std::max(best, *n.diff);
    if (!n.diff) CHECK(n.best_code == -1);
  }
  CHECK(best >= 0.005);
  auto csv = rates_csv(nodes);
  CHECK(csv.rfind("r,y,p1,p2,p3,best_ci,single_ci,diff,best_code\n", 0) == 0);
  CHECK(csv.find(",nan,nan,nan,none\n") != std::string::npos);
  CHECK_THROWS_AS(rate_planes(std::vector<CISpectrum>{}, 1.0, 8), DomainError);
  CHECK_THROWS_AS(rate_planes(reps, 0.0, 8), DomainError);
}

TEST_CASE("non-isomorphic graph counts") {
  const std::size_t expected[] = {1, 1, 2, 4, 11, 34, 156};
  for (int n = 1; n <= 6; ++n) CHECK(nonisomorphic_graphs(n).size() == expected[n]);
}

TEST_CASE("search with one system and one environment vertex") {
  auto res = exhaustive_search(1, 1, RayDirection::depolarizing());
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].is_best);
  CHECK(res.records[0].graph == single_letter());
}

TEST_CASE("search dedup matches brute-force canonical bucketing") {
  auto res = exhaustive_search(2, 3, RayDirection::depolarizing());
  std::set<std::string> oracle;
  std::uint64_t labeled = 0;
  for (int sys_edge = 0; sys_edge < 2; ++sys_edge)
    for (int r = 1; r <= 3; ++r)
      for (VertexMask bi = 0; bi < (VertexMask{1} << (2 * r)); ++bi) {
        ++labeled;
        std::vector<VertexMask> adj(2 + r, 0);
        if (sys_edge) adj[0] |= bit(1), adj[1] |= bit(0);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < r; ++j)
            if (test_bit(bi, i * r + j)) adj[i] |= bit(2 + j), adj[2 + j] |= bit(i);
        if (is_connected(adj)) oracle.insert(canonical_graph(adj, 2).key());
      }
  std::set<std::string> found;
  for (const auto& rec : res.records) {
    CHECK(found.insert(rec.canon_key).second);
    CHECK(canonical_graph(rec.graph.adjacency(), 2).key() == rec.canon_key);
  }
  CHECK(found == oracle);
  CHECK(res.labeled_candidates == labeled);
  int best = 0;
  for (const auto& rec : res.records) best += rec.is_best;
  CHECK(best >= 1);
  auto csv = search_csv(res.records);
  CHECK(csv.rfind("canon_key,k_sys,k_env,threshold,is_best\n", 0) == 0);
}

TEST_CASE("search resource bounds") {
  SearchOptions tiny;
  tiny.max_candidates = 10;
  CHECK_THROWS_AS(exhaustive_search(3, 2, RayDirection::depolarizing(), tiny), ResourceError);
  CHECK_THROWS_AS(exhaustive_search(6, 1, RayDirection::depolarizing()), DomainError);
  CHECK_THROWS_AS(exhaustive_search(2, 4, RayDirection::depolarizing()), DomainError);
}

TEST_CASE("two-level trees") {
  auto t5 = two_level_trees(5);
  CHECK(std::find(t5.begin(), t5.end(), std::vector<int>{0, 0, 0, 0}) != t5.end());
  for (const auto& t : two_level_trees(8)) {
    int k = 1;  // the root
    for (int l : t) k += 1 + l;
    CHECK(k == 8);
    CHECK(std::is_sorted(t.rbegin(), t.rend()));
  }
  std::vector<int> leaves{2, 2, 1, 0};
  CHECK(tree_automorphism_order(leaves) == automorphism_group(tree_graph(leaves)).order);
  std::vector<int> t16{2, 2, 2, 2, 0, 0, 0};
  CHECK(tree_automorphism_order(t16) == automorphism_group(tree_graph(t16)).order);
}

TEST_CASE("surfaces resolve corners where CI drops below rounding") {
  ScanOptions serial;
  serial.parallel = false;
  for (int k = 2; k <= 9; ++k) CHECK_NOTHROW(surface(symmetric_lambda(repetition_graph(k)), 33, serial));
  CHECK_NOTHROW(surface(symmetric_lambda(cat_graph(2, 2)), 33, serial));
  CHECK_NOTHROW(surface(symmetric_lambda(cat_graph(3, 2)), 33, serial));
  // the single letter keeps threshold 1/2 on the pure-axis rays
  for (const auto& d : {RayDirection(1, 0, 0), RayDirection(0, 1, 0), RayDirection(0, 0, 1)})
    CHECK(single_letter_threshold(d) == 0.5);
}
