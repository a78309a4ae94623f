#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "ciforge/block_system.hpp"
#include "ciforge/certificate.hpp"
#include "ciforge/conjugator.hpp"
#include "ciforge/ea_structure.hpp"
#include "ciforge/errors.hpp"

using namespace ciforge;

namespace {

Permutation shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<Point> v(n);
  std::iota(v.begin(), v.end(), 0);
  std::shuffle(v.begin(), v.end(), rng);
  return Permutation(std::move(v));
}

bool conjugates_onto_r(const FpSpace& s, const std::vector<Permutation>& q, const Permutation& c) {
  return std::all_of(q.begin(), q.end(),
                     [&](const Permutation& g) { return s.as_translation(conjugate(g, c)).has_value(); });
}

}  // namespace

TEST_CASE("Q equal to R needs no work") {
  FpSpace s(3, 3);
  auto q = conjugated_translations(s, Permutation::identity(s.size()));
  ConjugationCertificate c = conjugate_full(s, q, 7);
  CHECK(c.verified);
  CHECK(c.composite.is_identity());
  CHECK(c.steps.front().tag == StepTag::SYLOW);
  CHECK(c.steps.back().tag == StepTag::FINAL);
}

TEST_CASE("conjugates inside the Sylow subgroup") {
  std::mt19937_64 rng(11);
  for (auto [p, n] : {std::pair{2u, 3u}, {2u, 4u}, {3u, 2u}, {3u, 3u}}) {
    FpSpace s(p, n);
    for (int t = 0; t < 10; ++t) {
      auto q = conjugated_translations(s, random_wreath_element(s, rng));
      PropertyLog log;
      ConjugationCertificate c = conjugate_full(s, q, t, &log);
      CHECK(c.verified);
      CHECK(conjugates_onto_r(s, q, c.composite));
      CHECK(log.routes["sylow_trivial"] == 1);
    }
  }
}

TEST_CASE("random relabelings of rank 4") {
  std::mt19937_64 rng(5);
  for (unsigned p : {2u, 3u}) {
    FpSpace s(p, 4);
    PropertyLog log;
    for (int t = 0; t < (p == 2 ? 20 : 3); ++t) {
      auto q = conjugated_translations(s, shuffled(s.size(), rng));
      ConjugationCertificate c = conjugate_full(s, q, t, &log);
      CHECK(c.verified);
      CHECK(conjugates_onto_r(s, q, c.composite));
    }
    CHECK(log.centrality > 0);
    CHECK(log.psi_conjugation > 0);
  }
}

TEST_CASE("certificates round-trip and expose tampering") {
  std::mt19937_64 rng(3);
  FpSpace s(2, 4);
  auto q = conjugated_translations(s, shuffled(s.size(), rng));
  ConjugationCertificate c = conjugate_full(s, q, 99);
  std::istringstream in(format_certificate(c));
  ConjugationCertificate back = parse_certificate(in);
  CHECK(format_certificate(back) == format_certificate(c));
  CHECK(verify_certificate(back, q).ok);

  ConjugationCertificate bad = back;
  bad.composite = compose(bad.composite, Permutation::from_cycles(s.size(), {{0, 1}}));
  CHECK_FALSE(verify_certificate(bad, q).ok);

  bad = back;
  bad.steps.back().conjugator = compose(bad.steps.back().conjugator, Permutation::from_cycles(s.size(), {{2, 5}}));
  CHECK_FALSE(verify_certificate(bad, q).ok);

  std::istringstream junk("certificate 2 4 x\n");
  CHECK_THROWS_AS(parse_certificate(junk), ParseError);
}

TEST_CASE("rejects inputs outside the supported range") {
  FpSpace s(2, 5);
  auto q = conjugated_translations(s, Permutation::identity(s.size()));
  CHECK_THROWS_AS(conjugate_full(s, q, 0), std::invalid_argument);
  FpSpace t(2, 3);
  std::vector<Permutation> not_regular{Permutation::from_cycles(8, {{0, 1}})};
  CHECK_THROWS_AS(conjugate_full(t, not_regular, 0), std::invalid_argument);
}

TEST_CASE("step tags parse back") {
  for (auto tag : {StepTag::SYLOW, StepTag::L3_1, StepTag::C3_2, StepTag::L4_1, StepTag::L5_3,
                   StepTag::L5_4_CASE2, StepTag::FINAL})
    CHECK(parse_tag(tag_name(tag)) == tag);
  CHECK_THROWS_AS(parse_tag("NOPE"), ParseError);
}

TEST_CASE("equivalence classes are unions of blocks with local kernel elements") {
  for (auto [p, n] : {std::pair{2u, 3u}, {3u, 2u}}) {
    PermutationGroup g = wreath_sylow(p, n);
    OrbitalPartition o(g);
    for (const BlockSystem& b1 : all_block_systems(g)) {
      if (b1.block_size() != p) continue;
      EquivClasses e = equiv_classes(g, b1);
      std::size_t covered = 0;
      for (std::size_t k = 0; k < e.classes.size(); ++k) {
        covered += e.classes[k].size();
        for (Point x : e.classes[k]) {
          CHECK(e.class_of[x] == k);
          for (Point y : b1.block(b1.block_of(x))) CHECK(e.class_of[y] == k);
        }
      }
      CHECK(covered == g.degree());
      PermutationGroup kernel = kernel_on_blocks(g, b1);
      for (const auto& rho : kernel.generators())
        for (const auto& cls : e.classes) CHECK_NOTHROW(class_local_element(o, cls, rho));
    }
  }
}
