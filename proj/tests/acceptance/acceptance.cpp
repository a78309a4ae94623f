// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
// Thresholds are fixed here and never relaxed at run time.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ciforge/dci_verify.hpp"
#include "ciforge/ea_structure.hpp"
#include "ciforge/two_closure.hpp"
#include "frozen_values.hpp"

using namespace ciforge;

namespace {

using Clock = std::chrono::steady_clock;

constexpr double census_22_limit_secs = 1.0;
constexpr double census_23_limit_secs = 60.0;
constexpr double census_24_limit_secs = 1800.0;
constexpr double census_32_limit_secs = 60.0;
constexpr std::uint64_t campaign_24_trials = 500;
constexpr double campaign_24_limit_secs = 600.0;
constexpr std::uint64_t campaign_34_trials = 50;
constexpr double campaign_34_trial_timeout_secs = 120.0;
constexpr std::uint64_t campaign_seed = 20240601;
constexpr int closure_subgroups = 20;
constexpr std::size_t enumeration_order_cap = 5000;
constexpr int orbit_stabilizer_cases = 100;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

void census_criterion(unsigned p, unsigned n, double limit) {
  const std::string name = "census (" + std::to_string(p) + "," + std::to_string(n) + ")";
  try {
    const auto t0 = Clock::now();
    CensusReport r = brute_force_dci_oracle(p, n);
    const double secs = seconds_since(t0);
    const GroupOrder burnside = gl_orbit_count_burnside(p, n);
    const unsigned want = frozen::orbits(p, n);
    bool ok = r.aut_orbit_count == want && r.iso_class_count == want && burnside == want &&
              r.failures.empty() && secs < limit;
    std::ostringstream d;
    d << "orbits=" << r.aut_orbit_count << " iso=" << r.iso_class_count << " burnside=" << burnside
      << " frozen=" << want << " time=" << fixed(secs) << "s (limit " << limit << "s)";
    report(ok, name, d.str());
  } catch (const std::exception& e) {
    report(false, name, e.what());
  }
}

PropertyLog campaign_criterion(unsigned p, unsigned n, std::uint64_t trials, double trial_timeout,
                               double total_limit) {
  const std::string name = "campaign (" + std::to_string(p) + "," + std::to_string(n) + ")";
  CampaignReport r = random_pi_campaign(p, n, trials, campaign_seed, trial_timeout);
  bool ok = r.verified == trials && r.failures.empty() && r.timeouts == 0 &&
            (total_limit <= 0 || r.total_secs < total_limit);
  std::ostringstream d;
  d << r.verified << "/" << trials << " verified, failures=" << r.failures.size()
    << " timeouts=" << r.timeouts << " total=" << fixed(r.total_secs) << "s slowest=" << fixed(r.max_secs) << "s";
  if (total_limit > 0) d << " (limit " << total_limit << "s)";
  if (trial_timeout > 0) d << " (per-trial timeout " << trial_timeout << "s)";
  for (const auto& f : r.failures) d << "\n    failure seed=" << f.seed << " [" << f.tag << "] " << f.what;
  for (auto s : r.timeout_seeds) d << "\n    timeout seed=" << s;
  report(ok, name, d.str());
  PropertyLog log = r.log;
  // Contract failures abort a trial, so they are the violations of this run.
  log.routes["violations"] += r.failures.size();
  return log;
}

void babai_criterion() {
  std::uint64_t graphs = 0, yes = 0, agree = 0;
  for (auto [p, n] : {std::pair{2u, 2u}, {2u, 3u}}) {
    Classification c;
    CensusReport r = brute_force_dci_oracle(p, n, {}, &c);
    // Set level: S is a DCI-graph iff its isomorphism class is one orbit.
    std::vector<std::set<std::uint32_t>> orbits_in_class(r.iso_class_count);
    for (std::uint64_t m = 0; m < r.sets; ++m) orbits_in_class[c.iso_of[m]].insert(c.orbit_of[m]);
    for (std::uint64_t m = 0; m < r.sets; ++m) {
      BabaiResult b = babai_check(build_cayley(p, n, connection_set_from_mask(p, n, m)));
      const bool set_level = orbits_in_class[c.iso_of[m]].size() == 1;
      ++graphs;
      yes += b.outcome == BabaiOutcome::yes;
      agree += (b.outcome == BabaiOutcome::yes) == set_level && b.outcome != BabaiOutcome::inconclusive;
    }
  }
  report(yes == graphs && agree == graphs, "Babai bridge (2,2)+(2,3)",
         std::to_string(yes) + "/" + std::to_string(graphs) + " true, " + std::to_string(agree) + "/" +
             std::to_string(graphs) + " agree with the set-level classification");
}

PermutationGroup random_subgroup(const PermutationGroup& w, std::mt19937_64& rng) {
  std::vector<Permutation> gens;
  const int k = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < k; ++i) gens.push_back(w.random_element(rng));
  return PermutationGroup(w.degree(), gens);
}

void two_closure_criterion() {
  std::mt19937_64 rng(campaign_seed);
  std::uint64_t groups = 0, checks = 0, violations = 0;
  for (unsigned n : {3u, 4u}) {
    PermutationGroup w = wreath_sylow(2, n);
    for (int t = 0; t < closure_subgroups; ++t) {
      PermutationGroup g = random_subgroup(w, rng);
      PermutationGroup g2 = two_closure(g);
      OrbitalPartition orb(g);
      ++groups;
      for (const auto& x : g.generators()) {
        ++checks;
        violations += !g2.contains(x);
      }
      ++checks;
      violations += two_closure(g2).order() != g2.order();
      ++checks;
      violations += OrbitalPartition(g2).orbital_count() != orb.orbital_count();
      for (const auto& x : g2.generators()) {
        ++checks;
        violations += !in_two_closure(orb, x);
      }
      if (w.degree() <= 8) {
        // Exhaustive: membership test agrees with the computed group on all of Sym(N).
        std::vector<Point> img(w.degree());
        std::iota(img.begin(), img.end(), 0);
        do {
          Permutation x(img);
          ++checks;
          violations += in_two_closure(orb, x) != g2.contains(x);
        } while (std::next_permutation(img.begin(), img.end()));
      } else {
        for (int s = 0; s < 2000; ++s) {
          Permutation x = w.random_element(rng);
          ++checks;
          violations += in_two_closure(orb, x) != g2.contains(x);
        }
      }
    }
  }
  report(violations == 0, "2-closure suite",
         std::to_string(groups) + " groups, " + std::to_string(checks) + " checks, " +
             std::to_string(violations) + " violations");
}

void property_criterion(const PropertyLog& l2, const PropertyLog& l3) {
  PropertyLog all = l2;
  all.merge(l3);
  std::ostringstream d;
  bool ok = all.routes["violations"] == 0;
  auto counter = [&](const char* name, std::uint64_t v, bool must_fire) {
    d << name << "=" << v << " ";
    if (must_fire && v == 0) ok = false;
  };
  counter("block_agreement", all.block_agreement, true);
  counter("class_local", all.class_local, true);
  counter("psi_membership", all.psi_membership, true);
  counter("psi_conjugation", all.psi_conjugation, true);
  counter("alpha_commutation", all.alpha_commutation, true);
  counter("consistency_sum", all.consistency_sum, true);
  counter("sim_symmetry", all.sim_symmetry, true);
  counter("orbit_shape", all.orbit_shape, true);
  d << "equiv2_counts={";
  // Class counts of the second relation must be 1, p or p^2.
  for (const auto& [k, v] : l2.equiv2_class_counts) {
    d << "p2:" << k << "x" << v << " ";
    ok = ok && (k == 1 || k == 2 || k == 4);
  }
  for (const auto& [k, v] : l3.equiv2_class_counts) {
    d << "p3:" << k << "x" << v << " ";
    ok = ok && (k == 1 || k == 3 || k == 9);
  }
  d << "} violations=" << all.routes["violations"];
  report(ok, "pipeline property suite", d.str());
}

// Closure by breadth-first multiplication, independent of the stabilizer chain.
std::size_t enumerate_order(const PermutationGroup& g, std::size_t cap) {
  std::set<Permutation> seen{Permutation::identity(g.degree())};
  std::vector<Permutation> frontier{Permutation::identity(g.degree())};
  while (!frontier.empty() && seen.size() <= cap) {
    std::vector<Permutation> next;
    for (const auto& x : frontier)
      for (const auto& s : g.generators()) {
        Permutation y = compose(s, x);
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    frontier = std::move(next);
  }
  return seen.size();
}

Permutation random_perm(std::size_t n, std::mt19937_64& rng) {
  std::vector<Point> v(n);
  std::iota(v.begin(), v.end(), 0);
  std::shuffle(v.begin(), v.end(), rng);
  return Permutation(std::move(v));
}

void group_engine_criterion() {
  std::mt19937_64 rng(campaign_seed);
  std::vector<PermutationGroup> groups;
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<Point> cyc(n);
    for (std::size_t i = 0; i < n; ++i) cyc[i] = static_cast<Point>((i + 1) % n);
    groups.emplace_back(n, std::vector<Permutation>{Permutation(cyc), Permutation::from_cycles(n, {{0, 1}})});
    groups.emplace_back(n, std::vector<Permutation>{Permutation(cyc)});
  }
  groups.emplace_back(7, std::vector<Permutation>{Permutation::from_cycles(7, {{0, 1, 2}}),
                                                  Permutation::from_cycles(7, {{0, 1, 2, 3, 4, 5, 6}})});
  groups.push_back(wreath_sylow(2, 3));
  groups.push_back(wreath_sylow(3, 2));
  groups.push_back(regular_rep(2, 4));
  for (int t = 0; t < 40; ++t) groups.push_back(random_subgroup(wreath_sylow(2, 3 + t % 2), rng));
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 4 + t % 5;
    std::vector<Permutation> gens{random_perm(n, rng)};
    if (t % 2) gens.push_back(random_perm(n, rng));
    PermutationGroup g(n, gens);
    if (g.order() <= enumeration_order_cap) groups.push_back(std::move(g));
  }
  std::size_t compared = 0, mismatches = 0;
  for (const auto& g : groups) {
    if (g.order() > enumeration_order_cap) continue;
    ++compared;
    mismatches += GroupOrder(enumerate_order(g, enumeration_order_cap)) != g.order();
  }
  std::size_t os_mismatches = 0;
  for (int t = 0; t < orbit_stabilizer_cases; ++t) {
    const std::size_t n = 3 + static_cast<std::size_t>(t % 7);
    std::vector<Permutation> gens;
    for (int k = 0; k < 1 + t % 3; ++k) gens.push_back(random_perm(n, rng));
    PermutationGroup g(n, gens);
    const Point x = static_cast<Point>(rng() % n);
    os_mismatches += GroupOrder(g.orbit(x).size()) * g.point_stabilizer(x).order() != g.order();
  }
  report(mismatches == 0 && os_mismatches == 0 && compared >= 50, "group engine",
         std::to_string(compared) + " groups of order <= " + std::to_string(enumeration_order_cap) +
             " vs enumeration, " + std::to_string(mismatches) + " mismatches; orbit-stabilizer " +
             std::to_string(orbit_stabilizer_cases) + " cases, " + std::to_string(os_mismatches) + " mismatches");
}

}  // namespace

int main() {
  const auto start = Clock::now();
  census_criterion(2, 2, census_22_limit_secs);
  census_criterion(2, 3, census_23_limit_secs);
  census_criterion(2, 4, census_24_limit_secs);
  census_criterion(3, 2, census_32_limit_secs);
  PropertyLog l2 = campaign_criterion(2, 4, campaign_24_trials, 0, campaign_24_limit_secs);
  PropertyLog l3 = campaign_criterion(3, 4, campaign_34_trials, campaign_34_trial_timeout_secs, 0);
  babai_criterion();
  two_closure_criterion();
  property_criterion(l2, l3);
  group_engine_criterion();
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << "(" << failures << " failing, "
            << fixed(seconds_since(start)) << "s)" << std::endl;
  return failures ? 1 : 0;
}
