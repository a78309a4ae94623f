#include "doctest.h"

#include <random>
#include <set>

#include "ciforge/cayley.hpp"

using namespace ciforge;

namespace {

Permutation random_perm(std::size_t n, std::mt19937_64& rng) {
  std::vector<Point> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Point>(i);
  std::shuffle(v.begin(), v.end(), rng);
  return Permutation(std::move(v));
}

CayleyDigraph cay(unsigned p, unsigned n, std::vector<Point> s) {
  return build_cayley(p, n, ConnectionSet{p, n, std::move(s)});
}

}  // namespace

TEST_CASE("cayley arcs") {
  CHECK(cay(2, 2, {}).graph.arc_count() == 0);
  auto d = cay(2, 2, {1});
  CHECK(d.graph.arc_count() == 4);
  CHECK(d.graph.has_arc(0, 1));
  CHECK(d.graph.has_arc(1, 0));
  CHECK(d.graph.has_arc(2, 3));
  CHECK(d.graph.has_arc(3, 2));
  auto sq = cay(2, 2, {1, 2});
  CHECK(sq.graph.arc_count() == 8);
  CHECK_FALSE(sq.graph.has_arc(0, 3));
  CHECK_THROWS_AS(cay(2, 2, {4}), std::invalid_argument);
  auto loops = cay(3, 2, {0});
  for (Point x = 0; x < 9; ++x) CHECK(loops.graph.has_arc(x, x));
}

TEST_CASE("automorphism group orders") {
  CHECK(automorphism_group(cay(2, 2, {})).order() == 24);
  CHECK(automorphism_group(cay(2, 2, {1, 2, 3})).order() == 24);
  CHECK(automorphism_group(cay(2, 2, {1, 2})).order() == 8);
  // directed 9-cycle-free example: Cay(Z_3^2, {e0}) is three directed triangles
  CHECK(automorphism_group(cay(3, 2, {1})).order() == 3 * 3 * 3 * 6);
}

TEST_CASE("isomorphism witnesses") {
  auto a = cay(2, 2, {1}), b = cay(2, 2, {2});
  auto g = are_isomorphic(a.graph, b.graph);
  REQUIRE(g);
  CHECK(a.graph.relabeled(*g) == b.graph);
  CHECK(are_isomorphic(a.graph, a.graph));
  CHECK_FALSE(are_isomorphic(a.graph, cay(2, 2, {1, 2}).graph));
  CHECK_THROWS(are_isomorphic(a.graph, cay(2, 3, {1}).graph));
}

TEST_CASE("canonical form is relabeling invariant") {
  std::mt19937_64 rng(17);
  for (auto [p, n] : {std::pair{2u, 3u}, {3u, 2u}, {2u, 4u}}) {
    FpSpace s(p, n);
    for (int t = 0; t < 10; ++t) {
      std::uint64_t mask = rng() & ((std::uint64_t{1} << s.size()) - 1);
      auto d = build_cayley(s, connection_set_from_mask(p, n, mask));
      std::string f = canonical_form(d);
      for (int r = 0; r < 10; ++r) {
        Digraph e = d.graph.relabeled(random_perm(s.size(), rng));
        CHECK(canonical_form(e) == f);
        auto g = are_isomorphic(d.graph, e);
        REQUIRE(g);
        CHECK(d.graph.relabeled(*g) == e);
      }
    }
  }
  CHECK(canonical_form(cay(2, 2, {}).graph) != canonical_form(cay(2, 2, {0, 1, 2, 3}).graph));
}

TEST_CASE("sixteen (2,2) sets give eight forms") {
  std::set<std::string> forms;
  for (std::uint64_t m = 0; m < 16; ++m)
    forms.insert(canonical_form(build_cayley(2, 2, connection_set_from_mask(2, 2, m))));
  CHECK(forms.size() == 8);
}
