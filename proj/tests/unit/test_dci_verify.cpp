#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "ciforge/dci_verify.hpp"
#include "ciforge/ea_structure.hpp"
#include "ciforge/errors.hpp"
#include "frozen_values.hpp"

using namespace ciforge;

namespace {

ConnectionSet image(const Permutation& m, const ConnectionSet& s) {
  ConnectionSet out{s.p, s.n, {}};
  for (Point x : s.members) out.members.push_back(m(x));
  std::sort(out.members.begin(), out.members.end());
  return out;
}

}  // namespace

TEST_CASE("GL(n,p) as point permutations") {
  CHECK(aut_group_of_R(2, 2).size() == 6);
  CHECK(aut_group_of_R(3, 2).size() == 48);
  std::vector<Permutation> gl = aut_group_of_R(2, 4);
  CHECK(gl.size() == 20160);
  CHECK(gl.front().is_identity());
  CHECK(std::set<Permutation>(gl.begin(), gl.end()).size() == gl.size());
  CHECK(std::all_of(gl.begin(), gl.end(), [](const Permutation& g) { return g(0) == 0; }));
  CHECK_THROWS_AS(aut_group_of_R(3, 4), BudgetExceeded);
}

TEST_CASE("Burnside counts match the frozen oracle") {
  for (const auto& c : frozen::orbit_counts) {
    CHECK(gl_orbit_count_burnside(c.p, c.n) == c.orbits);
    CHECK(aut_group_of_R(c.p, c.n).size() == c.gl_order);
  }
}

TEST_CASE("exhaustive census on small spaces") {
  for (const auto& fc : frozen::orbit_counts) {
    if (fc.p == 2 && fc.n == 4) continue;  // covered by the acceptance run
    const unsigned want = fc.orbits;
    Classification detail;
    CensusReport r = brute_force_dci_oracle(fc.p, fc.n, {}, &detail);
    CHECK(r.aut_orbit_count == want);
    CHECK(r.iso_class_count == want);
    CHECK(r.dci_signature());
    std::uint64_t orbits = 0, iso = 0;
    for (const auto& l : r.per_size) {
      orbits += l.orbits;
      iso += l.iso;
    }
    CHECK(orbits == want);
    CHECK(iso == want);
    // Empty and full sets are singleton orbits.
    CHECK(r.per_size.front().orbits == 1);
    CHECK(r.per_size.back().orbits == 1);
    CHECK(detail.orbit_of.size() == r.sets);
  }
  CHECK_THROWS_AS(brute_force_dci_oracle(2, 5), BudgetExceeded);
}

TEST_CASE("canonical forms agree with pairwise isomorphism") {
  for (auto [p, n] : {std::pair{2u, 2u}, {3u, 2u}}) {
    FpSpace s(p, n);
    CensusReport r = brute_force_dci_oracle(p, n);
    std::vector<CayleyDigraph> reps;
    for (std::uint64_t m = 0; m < r.sets; ++m) {
      CayleyDigraph d = build_cayley(s, connection_set_from_mask(p, n, m));
      bool seen = std::any_of(reps.begin(), reps.end(), [&](const CayleyDigraph& e) {
        return e.graph.arc_count() == d.graph.arc_count() && are_isomorphic(e.graph, d.graph).has_value();
      });
      if (!seen) reps.push_back(std::move(d));
    }
    CHECK(reps.size() == r.iso_class_count);
  }
}

TEST_CASE("Babai check examples") {
  BabaiResult arcless = babai_check(build_cayley(2, 2, ConnectionSet{2, 2, {}}));
  CHECK(arcless.outcome == BabaiOutcome::yes);
  CHECK(arcless.aut_order == 24);
  CHECK(arcless.subgroups.size() == 1);  // the Klein group is normal in Sym(4)

  BabaiResult cycle = babai_check(build_cayley(2, 2, ConnectionSet{2, 2, {1, 2}}));
  CHECK(cycle.outcome == BabaiOutcome::yes);
  CHECK(cycle.aut_order == 8);
  CHECK(cycle.subgroups.size() == 1);
  CHECK(cycle.conjugators.size() == 1);

  BabaiResult arcless8 = babai_check(build_cayley(2, 3, ConnectionSet{2, 3, {}}));
  CHECK(arcless8.outcome == BabaiOutcome::yes);
  CHECK(arcless8.subgroups.size() == 30);  // 8! / |AGL(3,2)|

  // Linear relabeling leaves the verdict and the subgroup count unchanged.
  std::mt19937_64 rng(2);
  FpSpace s(2, 3);
  std::vector<Permutation> gl = aut_group_of_R(2, 3);
  for (int t = 0; t < 10; ++t) {
    ConnectionSet set = connection_set_from_mask(2, 3, rng() & 0xff);
    ConnectionSet moved = image(gl[rng() % gl.size()], set);
    BabaiResult a = babai_check(build_cayley(s, set)), b = babai_check(build_cayley(s, moved));
    CHECK(a.outcome == b.outcome);
    CHECK(a.subgroups.size() == b.subgroups.size());
  }

  BabaiResult starved = babai_check(build_cayley(2, 3, ConnectionSet{2, 3, {}}), 100);
  CHECK(starved.outcome == BabaiOutcome::inconclusive);
}

TEST_CASE("Babai verdicts match the set-level oracle graph by graph") {
  for (auto [p, n] : {std::pair{2u, 2u}, {3u, 1u}}) {
    Classification c;
    CensusReport r = brute_force_dci_oracle(p, n, {}, &c);
    for (std::uint64_t m = 0; m < r.sets; ++m) {
      bool set_level = true;
      for (std::uint64_t k = 0; k < r.sets; ++k)
        if (c.iso_of[k] == c.iso_of[m] && c.orbit_of[k] != c.orbit_of[m]) set_level = false;
      BabaiResult b = babai_check(build_cayley(p, n, connection_set_from_mask(p, n, m)));
      CHECK((b.outcome == BabaiOutcome::yes) == set_level);
    }
  }
}

TEST_CASE("linear witnesses") {
  std::mt19937_64 rng(4);
  for (auto [p, n] : {std::pair{3u, 2u}, {2u, 4u}, {3u, 3u}}) {
    FpSpace s(p, n);
    for (int t = 0; t < 5; ++t) {
      ConnectionSet set{p, n, {}};
      for (Point x = 0; x < s.size(); ++x)
        if (rng() % 3 == 0) set.members.push_back(x);
      std::vector<Point> cols;
      while (cols.size() < n) {
        Point c = static_cast<Point>(rng() % s.size());
        auto span = s.span(cols);
        if (!std::binary_search(span.begin(), span.end(), c)) cols.push_back(c);
      }
      ConnectionSet moved = image(s.linear_map(cols), set);
      std::optional<Permutation> m = linear_witness(s, set, moved);
      REQUIRE(m.has_value());
      CHECK(image(*m, set).members == moved.members);
      CHECK((*m)(0) == 0);
    }
  }
  FpSpace s(2, 3);
  CHECK_FALSE(linear_witness(s, ConnectionSet{2, 3, {1}}, ConnectionSet{2, 3, {1, 2}}).has_value());
}

TEST_CASE("sampled census is deterministic evidence") {
  CensusReport a = sampled_census(3, 2, 60, 5), b = sampled_census(3, 2, 60, 5);
  CHECK(format_census_report(a) == format_census_report(b));
  CHECK(a.dci_signature());
  CHECK(a.mode == CensusMode::sampled);
  CHECK(a.iso_class_count <= 36);
  CHECK(format_census_report(a).find("mode=sample seed=5") != std::string::npos);
}

TEST_CASE("random pi campaigns") {
  CampaignReport none = random_pi_campaign(2, 4, 0, 1);
  CHECK(none.trials == 0);
  CHECK(none.verified == 0);
  CHECK(none.failures.empty());

  CHECK(trial_pi(16, trial_seed(5, 3)) == trial_pi(16, trial_seed(5, 3)));
  CHECK(trial_seed(5, 3) != trial_seed(5, 4));

  CampaignReport r = random_pi_campaign(2, 3, 10, 8, 30);
  CHECK(r.verified == 10);
  CHECK(r.timeouts == 0);
  CHECK(r.log.block_agreement > 0);
  std::string text = format_campaign_report(r);
  CHECK(text.find("verified: 10") != std::string::npos);
  CHECK(text.find("timeouts: 0") != std::string::npos);
}

TEST_CASE("census report layout") {
  CensusReport r = brute_force_dci_oracle(2, 2);
  std::string text = format_census_report(r);
  CHECK(text.rfind("census p=2 n=2 mode=exhaustive seed=0 sets=16\n", 0) == 0);
  CHECK(text.find("size 2: orbits=2 iso=2\n") != std::string::npos);
  CHECK(text.find("total: orbits=8 iso=8\n") != std::string::npos);
  CHECK(text.find("dci: yes\n") != std::string::npos);
}
