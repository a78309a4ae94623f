#pragma once

// The elementary abelian group R = Z_p^n acting on itself.
//
// Points are labelled x = sum_i c_i * p^i, so the standard block system of
// level i (blocks of size p^i) groups the points sharing coordinates
// i..n-1, and block membership is integer division by p^i.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ciforge/block_system.hpp"
#include "ciforge/perm.hpp"
#include "ciforge/perm_group.hpp"

namespace ciforge {

/// Largest supported point count: CIFORGE_POINT_CAP or 81.
std::size_t point_cap();

class FpSpace {
 public:
  /// Throws std::invalid_argument unless p is prime, n >= 1 and p^n <= cap.
  FpSpace(unsigned p, unsigned n, std::size_t cap = point_cap());

  unsigned p() const noexcept { return p_; }
  unsigned n() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t power(unsigned i) const { return powers_[i]; }

  unsigned coord(Point x, unsigned i) const {
    return static_cast<unsigned>((x / powers_[i]) % p_);
  }
  std::vector<unsigned> coords(Point x) const;
  Point point(const std::vector<unsigned>& coords) const;
  Point unit(unsigned i) const { return static_cast<Point>(powers_[i]); }

  Point add(Point a, Point b) const { return add_[a * size_ + b]; }
  Point neg(Point a) const { return neg_[a]; }
  Point sub(Point a, Point b) const { return add(a, neg(b)); }
  Point scale(Point a, long long k) const;

  /// x -> x + t.
  Permutation translation(Point t) const;
  /// Translation vector of g if g is a translation.
  std::optional<Point> as_translation(const Permutation& g) const;
  /// x -> M x for the matrix whose j-th column is the point `columns[j]`.
  Permutation linear_map(const std::vector<Point>& columns) const;
  /// Points of the subgroup spanned by `vectors`, ascending.
  std::vector<Point> span(const std::vector<Point>& vectors) const;

 private:
  unsigned p_, n_;
  std::size_t size_;
  std::vector<std::size_t> powers_;
  std::vector<Point> add_;
  std::vector<Point> neg_;
};

/// R_L generated by the unit-vector translations.
PermutationGroup regular_rep(unsigned p, unsigned n);
/// Blocks of size p^level sharing coordinates level..n-1.
BlockSystem standard_blocks(unsigned p, unsigned n, unsigned level);
/// The iterated wreath product Z_p wr ... wr Z_p preserving every standard
/// block system; order p^((p^n - 1)/(p - 1)).
PermutationGroup wreath_sylow(unsigned p, unsigned n);
/// Uniform random element of wreath_sylow(p, n), drawn directly from its
/// coordinate description (x_j -> x_j + f_j(x_{j+1}, ..., x_{n-1})).
Permutation random_wreath_element(const FpSpace& space, std::mt19937_64& rng);

/// Elements of a regular group, indexed by where they send the base point.
class RegularGroupTable {
 public:
  /// Throws std::invalid_argument if <gens> is not regular.
  RegularGroupTable(std::size_t degree, const std::vector<Permutation>& gens, Point base = 0);

  Point base() const noexcept { return base_; }
  std::size_t size() const noexcept { return by_image_.size(); }
  /// The unique element g with g(base) = w.
  const Permutation& sending(Point w) const { return by_image_[w]; }
  bool contains(const Permutation& g) const { return by_image_[g(base_)] == g; }
  const std::vector<Permutation>& elements() const noexcept { return by_image_; }
  bool is_elementary_abelian(unsigned p) const;

 private:
  Point base_;
  std::vector<Permutation> by_image_;
};

/// y with Q = y^-1 R_L y, for a regular elementary abelian Q.
Permutation regular_conjugator(const FpSpace& space, const RegularGroupTable& q);

struct SylowEmbedding {
  Permutation c;               // element of <R, Q>
  std::vector<Permutation> qc; // generators of c^-1 Q c
  bool giant = false;          // <R, Q> contained Alt(N)
};

/// Finds c in G = <R, Q> with <R, c^-1 Q c> a p-group. Keeps c = id when G is
/// already a p-group. When G contains Alt(N), c lands Q on a conjugate of R
/// by a seeded random element of the standard wreath Sylow subgroup (with a
/// parity correction); otherwise samples G for a valid c.
SylowEmbedding sylow_embed(const FpSpace& space, const std::vector<Permutation>& q_gens,
                           std::uint64_t seed = 0);

struct TauFamily {
  Point base_point = 0;
  std::vector<Permutation> taus;        // translations by unit vectors
  std::vector<Permutation> tau_primes;  // elements of Q agreeing with taus at v
};

/// Canonical tau_i (unit translations) and their partners in Q. Throws
/// std::invalid_argument if <R, Q> does not admit every standard block
/// system, and ContractViolation if the block-agreement property fails.
TauFamily define_taus(const FpSpace& space, const RegularGroupTable& q, Point v = 0);

/// Block agreement: if tau' and tau agree on one block of `level` they agree
/// on all. Returns true when the implication holds.
bool block_agreement_holds(const BlockSystem& blocks, const Permutation& tau,
                           const Permutation& tau_prime);

}  // namespace ciforge
