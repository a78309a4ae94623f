#include "ciforge/block_system.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ciforge {

BlockSystem BlockSystem::from_labels(const std::vector<std::size_t>& labels) {
  BlockSystem bs;
  std::map<std::size_t, std::size_t> renumber;
  bs.block_of_.resize(labels.size());
  for (Point x = 0; x < labels.size(); ++x) {
    auto [it, inserted] = renumber.try_emplace(labels[x], bs.blocks_.size());
    if (inserted) bs.blocks_.emplace_back();
    bs.block_of_[x] = it->second;
    bs.blocks_[it->second].push_back(x);
  }
  for (const auto& b : bs.blocks_)
    if (b.size() != bs.blocks_.front().size())
      throw std::invalid_argument("blocks have unequal sizes");
  return bs;
}

BlockSystem BlockSystem::singletons(std::size_t degree) {
  std::vector<std::size_t> l(degree);
  std::iota(l.begin(), l.end(), std::size_t{0});
  return from_labels(l);
}

BlockSystem BlockSystem::single_block(std::size_t degree) {
  return from_labels(std::vector<std::size_t>(degree, 0));
}

bool BlockSystem::is_invariant_under(const Permutation& g) const {
  if (g.degree() != degree()) return false;
  for (const auto& b : blocks_) {
    std::size_t target = block_of_[g(b.front())];
    for (Point x : b)
      if (block_of_[g(x)] != target) return false;
  }
  return true;
}

bool BlockSystem::is_invariant_under(const PermutationGroup& g) const {
  for (const auto& s : g.generators())
    if (!is_invariant_under(s)) return false;
  return true;
}

bool BlockSystem::is_fixed_by(const Permutation& g) const {
  for (Point x = 0; x < degree(); ++x)
    if (block_of_[g(x)] != block_of_[x]) return false;
  return true;
}

Permutation BlockSystem::action_on_blocks(const Permutation& g) const {
  std::vector<Point> img(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    img[b] = static_cast<Point>(block_of_[g(blocks_[b].front())]);
  return Permutation(std::move(img));
}

BlockSystem block_system_generated_by(const PermutationGroup& g,
                                      const std::vector<Point>& seed) {
  if (!g.is_transitive())
    throw std::invalid_argument("block_system_generated_by: group is not transitive");
  return BlockSystem::from_labels(generated_congruence(g.degree(), g.generators(), seed));
}

std::vector<BlockSystem> all_block_systems(const PermutationGroup& g) {
  const std::size_t n = g.degree();
  std::set<std::vector<Point>> seen;
  std::vector<std::vector<Point>> frontier{{0}};
  seen.insert({0});
  std::vector<BlockSystem> out;
  while (!frontier.empty()) {
    auto blk = frontier.back();
    frontier.pop_back();
    out.push_back(block_system_generated_by(g, blk));
    std::vector<bool> in(n, false);
    for (Point x : blk) in[x] = true;
    for (Point w = 0; w < n; ++w) {
      if (in[w]) continue;
      auto seed = blk;
      seed.push_back(w);
      auto sys = block_system_generated_by(g, seed);
      auto b0 = sys.block(sys.block_of(0));
      if (seen.insert(b0).second) frontier.push_back(b0);
    }
  }
  std::sort(out.begin(), out.end(), [](const BlockSystem& a, const BlockSystem& b) {
    if (a.block_size() != b.block_size()) return a.block_size() < b.block_size();
    return a.blocks() < b.blocks();
  });
  return out;
}

PermutationGroup kernel_on_blocks(const PermutationGroup& g, const BlockSystem& b) {
  if (!b.is_invariant_under(g))
    throw std::invalid_argument("kernel_on_blocks: block system is not G-invariant");
  const std::size_t n = g.degree(), m = b.block_count();
  // Act on points and blocks together; the kernel is the pointwise stabilizer
  // of the block points.
  std::vector<Permutation> aug;
  for (const auto& s : g.generators()) {
    std::vector<Point> img(n + m);
    for (Point x = 0; x < n; ++x) img[x] = s(x);
    for (std::size_t k = 0; k < m; ++k)
      img[n + k] = static_cast<Point>(n + b.block_of(s(b.block(k).front())));
    aug.push_back(Permutation::unchecked(std::move(img)));
  }
  std::vector<Point> block_points(m);
  std::iota(block_points.begin(), block_points.end(), static_cast<Point>(n));
  PermutationGroup big(n + m, std::move(aug), block_points);
  PermutationGroup kern = big.pointwise_stabilizer(block_points);
  std::vector<Permutation> gens;
  for (const auto& s : kern.generators()) {
    std::vector<Point> img(s.images().begin(), s.images().begin() + n);
    gens.push_back(Permutation::unchecked(std::move(img)));
  }
  return PermutationGroup(n, std::move(gens), {}, kern.order());
}

}  // namespace ciforge
