#pragma once

// Partition refinement and backtracking over N x N color matrices.
//
// A matrix entry M(x, y) is the color of the ordered pair (x, y); a digraph is
// the 0/1 case and an orbital partition is the general case. Refinement
// splits cells by the multiset of (cell of y, color pair of (x,y),(y,x)), so
// it commutes with every color-preserving relabeling.

#include <cstdint>
#include <vector>

#include "ciforge/perm.hpp"
#include "ciforge/perm_group.hpp"

namespace ciforge {

class ColorMatrix {
 public:
  ColorMatrix() = default;
  /// `colors` is row-major with n * n entries.
  ColorMatrix(std::size_t n, std::vector<std::uint32_t> colors);

  std::size_t size() const noexcept { return n_; }
  std::uint32_t at(Point x, Point y) const { return colors_[x * n_ + y]; }
  const std::vector<std::uint32_t>& colors() const noexcept { return colors_; }

  /// The matrix M' with M'(pi(x), pi(y)) = M(x, y).
  ColorMatrix relabeled(const Permutation& pi) const;
  bool preserved_by(const Permutation& g) const;

  friend bool operator==(const ColorMatrix&, const ColorMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> colors_;
};

struct SearchLimits {
  /// Search nodes per call before BudgetExceeded is thrown.
  std::uint64_t node_limit = 20'000'000;
};

/// Generators of the color-preserving permutation group. `hints` are
/// permutations already known to preserve the matrix; they seed the search
/// and are ignored if they do not.
std::vector<Permutation> automorphism_generators(const ColorMatrix& m,
                                                 const std::vector<Permutation>& hints = {},
                                                 SearchLimits limits = {});

struct CanonicalLabeling {
  Permutation labeling;             // point -> canonical position
  std::vector<std::uint32_t> form;  // relabeled matrix, row-major
};

/// Canonical relabeling. Two matrices whose colors mean the same thing get
/// the same form iff one is a relabeling of the other. `aut` may be any
/// subgroup of the automorphism group; it is used only for pruning.
CanonicalLabeling canonical_labeling(const ColorMatrix& m, const PermutationGroup& aut,
                                     SearchLimits limits = {});

}  // namespace ciforge
