#include "doctest.h"

#include <random>
#include <set>

#include "ciforge/block_system.hpp"
#include "ciforge/errors.hpp"
#include "ciforge/perm_group.hpp"
#include "ciforge/text_io.hpp"

using namespace ciforge;

namespace {

Permutation random_perm(std::size_t n, std::mt19937_64& rng) {
  std::vector<Point> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Point>(i);
  std::shuffle(v.begin(), v.end(), rng);
  return Permutation(std::move(v));
}

std::set<Permutation> closure(const std::vector<Permutation>& gens, std::size_t n) {
  std::set<Permutation> seen{Permutation::identity(n)};
  std::vector<Permutation> todo{Permutation::identity(n)};
  while (!todo.empty()) {
    Permutation g = todo.back();
    todo.pop_back();
    for (const auto& s : gens) {
      Permutation h = compose(s, g);
      if (seen.insert(h).second) todo.push_back(h);
    }
  }
  return seen;
}

}  // namespace

TEST_CASE("composition is right to left") {
  Permutation a({1, 2, 0});
  Permutation b({1, 0, 2});
  CHECK(compose(a, b)(0) == a(b(0)));
  CHECK(compose(a, b)(0) == 2);
  CHECK(conjugate(a, b) == compose(inverse(b), compose(a, b)));
  CHECK(power(a, 3).is_identity());
  CHECK(power(a, -1) == inverse(a));
  CHECK(a.order() == 3);
  CHECK(a.is_even());
  CHECK_FALSE(b.is_even());
}

TEST_CASE("bad permutations are rejected") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation({0, 3}), std::invalid_argument);
  CHECK_THROWS(compose(Permutation::identity(2), Permutation::identity(3)));
}

TEST_CASE("permutation text round trips") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    Permutation g = random_perm(9, rng);
    CHECK(parse_permutation(format_permutation(g)) == g);
  }
  CHECK_THROWS_AS(parse_permutation("perm 3: 0 0 1"), ParseError);
  CHECK_THROWS_AS(parse_permutation("perm 3: 0 1"), ParseError);
  CHECK_THROWS_AS(parse_permutation("garbage"), ParseError);
}

TEST_CASE("order matches enumeration on small random groups") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    std::size_t n = 3 + t % 5;
    std::vector<Permutation> gens;
    for (int k = 0; k < 1 + t % 2; ++k) gens.push_back(random_perm(n, rng));
    PermutationGroup g(n, gens);
    auto elems = closure(gens, n);
    CHECK(g.order() == elems.size());
    for (const auto& e : elems) CHECK(g.contains(e));
  }
}

TEST_CASE("symmetric and alternating groups") {
  for (std::size_t n : {5u, 8u, 13u, 20u}) {
    std::vector<Point> cyc(n);
    for (std::size_t i = 0; i < n; ++i) cyc[i] = static_cast<Point>((i + 1) % n);
    Permutation c(cyc);
    Permutation t = Permutation::from_cycles(n, {{0, 1}});
    GroupOrder fact = 1;
    for (std::size_t k = 2; k <= n; ++k) fact *= k;
    PermutationGroup s(n, {c, t});
    CHECK(s.order() == fact);
    CHECK(contains_alternating(n, {c, t}));
    MembershipOracle m(n, {c, t});
    CHECK(m.is_giant());
    CHECK(m.contains(t));
  }
  Permutation three = Permutation::from_cycles(9, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}});
  CHECK_FALSE(contains_alternating(9, {three}));
}

TEST_CASE("orbit-stabilizer") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    std::size_t n = 6 + t % 4;
    PermutationGroup g(n, {random_perm(n, rng), random_perm(n, rng)});
    Point v = static_cast<Point>(t % n);
    CHECK(g.order() == g.orbit(v).size() * g.point_stabilizer(v).order());
  }
}

TEST_CASE("block systems of a cyclic group of order 8") {
  std::vector<Point> cyc(8);
  for (Point i = 0; i < 8; ++i) cyc[i] = (i + 1) % 8;
  PermutationGroup g(8, {Permutation(cyc)});
  auto systems = all_block_systems(g);
  CHECK(systems.size() == 4);  // block sizes 1, 2, 4, 8
  BlockSystem halves = block_system_generated_by(g, {0, 4});
  CHECK(halves.block_size() == 2);
  CHECK(kernel_on_blocks(g, halves).order() == 2);
}
