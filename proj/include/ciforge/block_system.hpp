#pragma once

#include <cstddef>
#include <vector>

#include "ciforge/perm.hpp"
#include "ciforge/perm_group.hpp"

namespace ciforge {

/// A partition of [0, N) into equal-size blocks. Blocks are numbered in order
/// of their smallest point; each block lists its points ascending.
class BlockSystem {
 public:
  BlockSystem() = default;

  /// `labels[x]` is any block label for x. Throws unless blocks are equal-size.
  static BlockSystem from_labels(const std::vector<std::size_t>& labels);
  static BlockSystem singletons(std::size_t degree);
  static BlockSystem single_block(std::size_t degree);

  std::size_t degree() const noexcept { return block_of_.size(); }
  std::size_t block_of(Point x) const { return block_of_[x]; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  std::size_t block_size() const noexcept {
    return blocks_.empty() ? 0 : blocks_.front().size();
  }
  const std::vector<Point>& block(std::size_t b) const { return blocks_[b]; }
  const std::vector<std::vector<Point>>& blocks() const noexcept { return blocks_; }

  bool same_block(Point x, Point y) const { return block_of_[x] == block_of_[y]; }
  /// g maps every block onto a block.
  bool is_invariant_under(const Permutation& g) const;
  bool is_invariant_under(const PermutationGroup& g) const;
  /// g maps every block onto itself.
  bool is_fixed_by(const Permutation& g) const;
  /// Induced permutation on block indices (g must leave the system invariant).
  Permutation action_on_blocks(const Permutation& g) const;

  friend bool operator==(const BlockSystem& a, const BlockSystem& b) {
    return a.block_of_ == b.block_of_;
  }

 private:
  std::vector<std::size_t> block_of_;
  std::vector<std::vector<Point>> blocks_;
};

/// Finest G-invariant block system with all of `seed` in one block.
/// Throws std::invalid_argument if G is not transitive.
BlockSystem block_system_generated_by(const PermutationGroup& g,
                                      const std::vector<Point>& seed);

/// Every block system of a transitive group, ordered by block size.
std::vector<BlockSystem> all_block_systems(const PermutationGroup& g);

/// Elements of G fixing every block setwise. Throws if B is not G-invariant.
PermutationGroup kernel_on_blocks(const PermutationGroup& g, const BlockSystem& b);

}  // namespace ciforge
