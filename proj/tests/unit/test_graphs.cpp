#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"

#include "gsci/directci.hpp"
#include "gsci/errors.hpp"
#include "gsci/graphs.hpp"
#include "gsci/permgroup.hpp"
#include "../support.hpp"

using namespace gsci;

namespace {

GraphErrorKind load_error(const std::string& text, LoadOptions opts = {}) {
  try {
    graph_from_json(text, opts);
  } catch (const GraphError& e) {
    return e.kind();
  }
  FAIL("graph accepted: " << text);
  return GraphErrorKind::kMalformed;
}

}  // namespace

TEST_CASE("repetition graphs are stars with the environment on the center") {
  auto g = repetition_graph(5);
  CHECK(g.n() == 6);
  CHECK(g.k_sys() == 5);
  CHECK(g.k_env() == 1);
  CHECK(g.neighbors(0) == 0b111110);
  for (int v = 1; v <= 5; ++v) CHECK(g.neighbors(v) == 1);
  auto p3 = repetition_graph(2);
  CHECK(p3.edges() == std::vector<Edge>{{0, 1}, {0, 2}});
  CHECK_THROWS_AS(repetition_graph(1), DomainError);
  CHECK(repetition_graph(60).n() == 61);
}

TEST_CASE("cat graphs") {
  for (int n2 = 2; n2 <= 6; ++n2) CHECK(cat_graph(1, n2) == repetition_graph(n2));
  auto shor = cat_graph(3, 3);
  CHECK(shor.n() == 10);
  CHECK(shor.k_sys() == 9);
  CHECK(isomorphic(shor, shor_graph()));
  CHECK(automorphism_group(shor).order == 48);
  for (int n1 = 1; n1 <= 4; ++n1)
    for (int n2 = 2; n2 <= 4; ++n2) {
      auto g = cat_graph(n1, n2);
      CHECK(g.k_sys() == n1 * n2);
      CHECK(g.k_env() == 1);
    }
  CHECK_THROWS_AS(cat_graph(0, 3), DomainError);
  CHECK_THROWS_AS(cat_graph(2, 1), DomainError);
}

TEST_CASE("two-level tree graphs") {
  CHECK(tree_graph(std::vector<int>{0, 0, 0, 0}) == repetition_graph(5));
  auto t = tree_graph(std::vector<int>{2, 2, 2, 2, 2});
  CHECK(t.k_sys() == 16);
  CHECK(t.neighbors(t.n() - 1) == 1);
  CHECK(tree_graph(std::vector<int>{1, 1, 1, 1, 1, 1, 1}).k_sys() == 15);
  CHECK_THROWS_AS(tree_graph(std::vector<int>{}), DomainError);
}

TEST_CASE("local complementation") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 30; ++i) {
    auto g = testing::random_code(rng, 6, 3);
    for (int v = 0; v < g.n(); ++v) CHECK(local_complement(local_complement(g, v), v) == g);
  }
  auto star = repetition_graph(4);
  for (int v = 1; v <= 4; ++v) CHECK(local_complement(star, v) == star);
  auto lc = local_complement(star, 0);
  for (int a = 1; a <= 4; ++a) {
    CHECK(lc.adjacent(0, a));
    for (int b = a + 1; b <= 4; ++b) CHECK(lc.adjacent(a, b));
  }
  CHECK_THROWS_AS(local_complement(star, 5), DomainError);
}

TEST_CASE("local complementation preserves depolarizing CI on small graphs") {
  const auto p = RayDirection::depolarizing().at(0.12);
  for (int n = 2; n <= 5; ++n)
    for (const auto& g : testing::all_small_codes(n)) {
      const double base = direct_ci(g, p);
      for (int v = 0; v < n; ++v) {
        auto lc = local_complement(g, v);
        if (!is_connected(lc.adjacency())) continue;
        CHECK(std::abs(direct_ci(lc, p) - base) <= 1e-10);
      }
    }
}

TEST_CASE("graph JSON round trip and diagnostics") {
  auto g = graph_from_json(R"({"n":2,"k_sys":1,"edges":[[0,1]]})");
  CHECK(g.n() == 2);
  CHECK(g.k_sys() == 1);
  CHECK(graph_to_json(g) == "{\"n\":2,\"k_sys\":1,\"edges\":[[0,1]]}\n");
  auto dir = std::filesystem::temp_directory_path() / "gsci_graph_test";
  std::filesystem::create_directories(dir);
  for (const auto& code : {repetition_graph(5), cat_graph(3, 3), tree_graph(std::vector<int>{2, 0, 1})}) {
    save_graph(code, dir / "g.json");
    CHECK(load_graph(dir / "g.json") == code);
    std::ifstream in(dir / "g.json");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == graph_to_json(code));
  }
  CHECK(load_error("{not json") == GraphErrorKind::kMalformed);
  CHECK(load_error(R"({"n":2,"k_sys":1,"edges":[[0,0]]})") == GraphErrorKind::kSelfLoop);
  CHECK(load_error(R"({"n":2,"k_sys":1,"edges":[[1,0]]})") == GraphErrorKind::kNonSymmetric);
  CHECK(load_error(R"({"n":3,"k_sys":1,"edges":[[0,1]]})") == GraphErrorKind::kDisconnected);
  CHECK(load_error(R"({"n":2,"k_sys":2,"edges":[[0,1]]})") == GraphErrorKind::kPartition);
  CHECK(load_error(R"({"n":2,"k_sys":1,"edges":[[0,5]]})") == GraphErrorKind::kVertexRange);
  const std::string env_edge = R"({"n":4,"k_sys":2,"edges":[[0,1],[1,2],[2,3]]})";
  CHECK(graph_from_json(env_edge).has_env_edges());
  CHECK(load_error(env_edge, LoadOptions{true}) == GraphErrorKind::kEnvEdge);
}

TEST_CASE("system-environment block and Gamma times x") {
  auto g = cat_graph(2, 2);
  auto block = g.system_env_block();
  REQUIRE(block.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(block[i] == (g.adjacent(i, 4) ? 1u : 0u));
  CHECK(g.env_to_system(1) == (g.neighbors(4) & g.system_mask()));
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    auto h = testing::random_code(rng, 7, 4);
    VertexMask x = rng() & low_mask(7);
    VertexMask expect = 0;
    for (int r = 0; r < 7; ++r) expect |= static_cast<VertexMask>(parity(h.neighbors(r) & x)) << r;
    CHECK(h.multiply(x) == expect);
  }
}
