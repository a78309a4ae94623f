#pragma once

// Orbitals and the 2-closure G^(2): the largest group with G's orbitals.

#include <string>
#include <vector>

#include "ciforge/perm_group.hpp"
#include "ciforge/refine_search.hpp"

namespace ciforge {

/// Colors of ordered pairs by G-orbit. Colors are numbered in order of first
/// appearance when pairs are listed as (0,0), (0,1), ..., (N-1,N-1).
class OrbitalPartition {
 public:
  OrbitalPartition() = default;
  explicit OrbitalPartition(const PermutationGroup& g);
  OrbitalPartition(std::size_t degree, const std::vector<Permutation>& gens);

  std::size_t degree() const noexcept { return n_; }
  std::size_t orbital_count() const noexcept { return count_; }
  std::uint32_t color_of(Point a, Point b) const { return color_[a * n_ + b]; }
  ColorMatrix color_matrix() const { return ColorMatrix(n_, color_); }

 private:
  std::size_t n_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint32_t> color_;
};

OrbitalPartition orbitals(const PermutationGroup& g);

/// True iff x preserves every orbital color. Throws on degree mismatch.
bool in_two_closure(const OrbitalPartition& o, const Permutation& x);
bool in_two_closure(const PermutationGroup& g, const Permutation& x);

/// Full G^(2). Throws std::invalid_argument above the point cap; use
/// in_two_closure for membership on larger inputs.
PermutationGroup two_closure(const PermutationGroup& g);

/// `orbital k: (a,b) (c,d) ...`, one line per color.
std::string format_orbitals(const OrbitalPartition& o);

}  // namespace ciforge
