#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ciforge/cayley.hpp"
#include "ciforge/conjugator.hpp"
#include "ciforge/perm_group.hpp"

namespace ciforge {

/// All of GL(n, p) as point permutations, ordered lexicographically by
/// column images. Throws BudgetExceeded when |GL| exceeds `limit`.
std::vector<Permutation> aut_group_of_R(unsigned p, unsigned n, std::size_t limit = 2'000'000);

/// Number of Aut(R)-orbits on subsets of R, by Burnside over GL(n, p).
GroupOrder gl_orbit_count_burnside(unsigned p, unsigned n);

enum class CensusMode { exhaustive, sampled };

struct SizeLine {
  std::size_t size = 0;
  std::uint64_t orbits = 0, iso = 0;
};

struct CensusReport {
  unsigned p = 0, n = 0;
  CensusMode mode = CensusMode::exhaustive;
  std::uint64_t seed = 0;
  std::uint64_t sets = 0;  // connection sets examined
  std::uint64_t iso_class_count = 0;
  std::uint64_t aut_orbit_count = 0;
  std::vector<SizeLine> per_size;
  double elapsed_secs = 0;  // not part of the persisted text
  std::vector<std::string> failures;

  bool dci_signature() const {
    return failures.empty() && iso_class_count == aut_orbit_count;
  }
};

/// Header, `size k: orbits=a iso=b` lines, totals, one `failure:` line each.
std::string format_census_report(const CensusReport& r);

struct CensusOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  /// Canonical forms already known, e.g. loaded from a cache.
  std::function<std::optional<std::string>(std::uint64_t mask)> lookup;
  /// Called under a lock for each freshly computed form, in completion order.
  std::function<void(std::uint64_t mask, const std::string& form)> record;
};

/// Per-set classification of an exhaustive run, indexed by bitmask.
struct Classification {
  std::vector<std::uint32_t> orbit_of;  // id of the Aut(R)-orbit
  std::vector<std::uint32_t> iso_of;    // id of the isomorphism class
};

/// Largest p^n for which every subset is enumerated.
inline constexpr std::size_t exhaustive_point_limit = 16;

/// Exhaustive census. Throws BudgetExceeded when p^n > exhaustive_point_limit.
CensusReport brute_force_dci_oracle(unsigned p, unsigned n, const CensusOptions& opt = {},
                                    Classification* detail = nullptr);

/// A linear map M with M(S) = T, found from an arbitrary isomorphism of the
/// Cayley digraphs by conjugating its image of R back onto R inside the
/// 2-closure. nullopt iff the digraphs are not isomorphic.
std::optional<Permutation> linear_witness(const FpSpace& space, const ConnectionSet& s,
                                          const ConnectionSet& t, PropertyLog* log = nullptr);

/// Sampled census: `samples` sets stratified by size, each paired with a
/// random GL-image; equality of sampled iso classes and orbits is decided
/// with linear_witness. Evidence only.
CensusReport sampled_census(unsigned p, unsigned n, std::uint64_t samples, std::uint64_t seed,
                            PropertyLog* log = nullptr);

enum class BabaiOutcome { yes, no, inconclusive };

struct BabaiResult {
  BabaiOutcome outcome = BabaiOutcome::inconclusive;
  GroupOrder aut_order = 0;
  std::vector<std::vector<Permutation>> subgroups;  // generators of each regular subgroup
  std::vector<Permutation> conjugators;             // x in A with x^-1 T x = R_L, per subgroup
};

/// Decides whether Aut(D) has a single conjugacy class of regular
/// elementary abelian subgroups of order p^n.
BabaiResult babai_check(const CayleyDigraph& d, std::uint64_t node_budget = 5'000'000);

struct TrialFailure {
  std::uint64_t seed = 0;
  std::string tag, what;
};

struct CampaignReport {
  unsigned p = 0, n = 0;
  std::uint64_t seed = 0, trials = 0, verified = 0, timeouts = 0;
  std::vector<TrialFailure> failures;
  std::vector<std::uint64_t> timeout_seeds;
  double max_secs = 0, total_secs = 0;
  PropertyLog log;
};

/// Seeded uniform pi per trial, conjugate_full on pi^-1 R pi. A trial that
/// outlives `timeout_secs` is abandoned and counted as a timeout.
CampaignReport random_pi_campaign(unsigned p, unsigned n, std::uint64_t trials, std::uint64_t seed,
                                  double timeout_secs = 0);

/// Seed of trial `t` and its pi, so a failing trial can be replayed alone.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t);
Permutation trial_pi(std::size_t degree, std::uint64_t trial_seed);

std::string format_campaign_report(const CampaignReport& r);

}  // namespace ciforge
