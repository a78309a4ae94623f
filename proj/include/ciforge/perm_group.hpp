#pragma once

// Permutation groups backed by a deterministic Schreier-Sims stabilizer chain.
//
// Groups are immutable values. Base points not supplied by the caller are
// taken as the smallest point moved by the generator that needs them, so the
// chain is a deterministic function of (generators, base prefix).

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ciforge/perm.hpp"

namespace ciforge {

using GroupOrder = boost::multiprecision::cpp_int;

class PermutationGroup {
 public:
  /// Trivial group on `degree` points.
  explicit PermutationGroup(std::size_t degree = 0);

  /// Builds the stabilizer chain. `base_prefix` fixes the first base points.
  /// If `known_order` is given, construction stops as soon as the chain
  /// reaches that order (the caller vouches for it).
  PermutationGroup(std::size_t degree, std::vector<Permutation> generators,
                   std::vector<Point> base_prefix = {},
                   std::optional<GroupOrder> known_order = std::nullopt);

  std::size_t degree() const noexcept { return degree_; }
  const std::vector<Permutation>& generators() const noexcept { return generators_; }
  const std::vector<Permutation>& strong_generators() const noexcept { return strong_; }
  std::vector<Point> base() const;

  GroupOrder order() const;
  bool is_trivial() const noexcept { return strong_.empty(); }

  bool contains(const Permutation& g) const;

  /// Orbit of x under the group, ascending.
  std::vector<Point> orbit(Point x) const;
  /// All orbits, each ascending, ordered by smallest element.
  std::vector<std::vector<Point>> orbits() const;
  bool is_transitive() const;

  /// Basic orbit and transversal at chain level `level`.
  std::size_t chain_length() const noexcept { return levels_.size(); }
  Point base_point(std::size_t level) const { return levels_[level].base_point; }
  const std::vector<Point>& basic_orbit(std::size_t level) const {
    return levels_[level].orbit;
  }

  PermutationGroup point_stabilizer(Point v) const;
  /// Subgroup fixing every point in `points`.
  PermutationGroup pointwise_stabilizer(std::span<const Point> points) const;
  /// Group generated by x^-1 g x over the generators.
  PermutationGroup conjugate(const Permutation& x) const;
  /// Same group with a chain whose base starts with `prefix`.
  PermutationGroup with_base_prefix(std::vector<Point> prefix) const;

  Permutation random_element(std::mt19937_64& rng) const;
  /// Every element; throws std::length_error if the order exceeds `limit`.
  std::vector<Permutation> elements(std::size_t limit = 1'000'000) const;

 private:
  struct Level {
    Point base_point = 0;
    std::vector<Point> orbit;
    std::vector<int> position;  // point -> index in orbit, -1 if absent
    std::vector<Permutation> transversal;
    std::vector<Permutation> transversal_inv;
    std::vector<std::size_t> gens;     // indices into strong_
    std::vector<std::size_t> checked;  // per orbit point, gens already checked
  };

  void add_level(Point base_point);
  void extend_orbit(Level& level);
  std::pair<Permutation, std::size_t> sift(Permutation h, std::size_t from) const;
  void schreier_sims(const std::optional<GroupOrder>& known_order);

  std::size_t degree_ = 0;
  std::vector<Permutation> generators_;
  std::vector<Permutation> strong_;
  std::vector<Level> levels_;
};

/// Spec-level names for the group operations.
PermutationGroup group_from_generators(std::size_t degree, std::vector<Permutation> gens);
std::vector<Point> orbit(const PermutationGroup& g, Point x);
PermutationGroup point_stabilizer(const PermutationGroup& g, Point v);
PermutationGroup conjugate_subgroup(const PermutationGroup& g, const Permutation& x);

/// True iff `order` is a power of the prime `p` (1 counts as p^0).
bool is_prime_power_of(const GroupOrder& order, unsigned p);
bool is_prime(unsigned long long p);

}  // namespace ciforge

namespace ciforge {

/// Orbit of x under <gens>, ascending, without building a chain.
std::vector<Point> generated_orbit(std::size_t degree, const std::vector<Permutation>& gens,
                                   Point x);
/// Labels of the finest <gens>-invariant equivalence joining all of `seed`.
std::vector<std::size_t> generated_congruence(std::size_t degree,
                                              const std::vector<Permutation>& gens,
                                              const std::vector<Point>& seed);
/// Block containing `seed` in the finest <gens>-congruence joining `seed`.
std::vector<Point> minimal_block(std::size_t degree, const std::vector<Permutation>& gens,
                                 const std::vector<Point>& seed);

/// True iff <gens> contains Alt(degree). Uses primitivity plus a seeded
/// Jordan-cycle search for degree > 12 and falls back to the stabilizer chain.
bool contains_alternating(std::size_t degree, const std::vector<Permutation>& gens);

/// Membership in <gens>, taking the Alt/Sym shortcut when it applies so that
/// giant groups on ~81 points never need a full stabilizer chain.
class MembershipOracle {
 public:
  MembershipOracle(std::size_t degree, std::vector<Permutation> gens);
  bool contains(const Permutation& g) const;
  bool is_giant() const noexcept { return giant_; }
  /// Order as a group; only cheap when not giant.
  GroupOrder order() const;

 private:
  std::size_t degree_;
  std::vector<Permutation> gens_;
  bool giant_ = false;
  bool all_even_ = true;
  std::optional<PermutationGroup> chain_;
};

}  // namespace ciforge
