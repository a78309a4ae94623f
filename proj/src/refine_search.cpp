#include "ciforge/refine_search.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "ciforge/errors.hpp"

namespace ciforge {

ColorMatrix::ColorMatrix(std::size_t n, std::vector<std::uint32_t> colors)
    : n_(n), colors_(std::move(colors)) {
  if (colors_.size() != n_ * n_) throw std::invalid_argument("color matrix must be n x n");
}

ColorMatrix ColorMatrix::relabeled(const Permutation& pi) const {
  std::vector<std::uint32_t> out(n_ * n_);
  for (Point x = 0; x < n_; ++x)
    for (Point y = 0; y < n_; ++y) out[pi(x) * n_ + pi(y)] = at(x, y);
  return ColorMatrix(n_, std::move(out));
}

bool ColorMatrix::preserved_by(const Permutation& g) const {
  if (g.degree() != n_) return false;
  for (Point x = 0; x < n_; ++x)
    for (Point y = 0; y < n_; ++y)
      if (at(g(x), g(y)) != at(x, y)) return false;
  return true;
}

namespace {

using Cells = std::vector<std::vector<Point>>;

class Engine {
 public:
  Engine(const ColorMatrix& m, SearchLimits limits) : m_(m), n_(m.size()), limits_(limits) {
    // Codes for (is diagonal, M(x,y), M(y,x)), numbered in sorted order so the
    // numbering does not depend on point labels.
    std::vector<std::tuple<bool, std::uint32_t, std::uint32_t>> seen;
    for (Point x = 0; x < n_; ++x)
      for (Point y = 0; y < n_; ++y) seen.emplace_back(x == y, m.at(x, y), m.at(y, x));
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    codes_ = seen.size();
    pair_code_.resize(n_ * n_);
    for (Point x = 0; x < n_; ++x)
      for (Point y = 0; y < n_; ++y) {
        auto key = std::make_tuple(x == y, m.at(x, y), m.at(y, x));
        pair_code_[x * n_ + y] = static_cast<std::uint32_t>(
            std::lower_bound(seen.begin(), seen.end(), key) - seen.begin());
      }
  }

  std::size_t size() const { return n_; }

  Cells root() const {
    std::vector<Point> all(n_);
    std::iota(all.begin(), all.end(), 0);
    return {all};
  }

  void count_node() {
    if (++nodes_ > limits_.node_limit) throw BudgetExceeded("search node limit exceeded");
  }

  // Refines to the coarsest equitable partition below `cells`; returns a
  // relabeling-invariant hash of the result.
  std::uint64_t refine(Cells& cells) const {
    std::vector<std::uint32_t> cell_of(n_);
    std::vector<std::vector<std::uint64_t>> sig;
    for (;;) {
      for (std::size_t c = 0; c < cells.size(); ++c)
        for (Point x : cells[c]) cell_of[x] = static_cast<std::uint32_t>(c);
      bool split = false;
      Cells next;
      next.reserve(n_);
      for (auto& cell : cells) {
        if (cell.size() == 1) {
          next.push_back(std::move(cell));
          continue;
        }
        sig.assign(cell.size(), {});
        for (std::size_t i = 0; i < cell.size(); ++i) sig[i] = signature(cell[i], cell_of);
        std::vector<std::size_t> idx(cell.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
        std::vector<Point> part{cell[idx[0]]};
        for (std::size_t i = 1; i < idx.size(); ++i) {
          if (sig[idx[i]] != sig[idx[i - 1]]) {
            next.push_back(std::move(part));
            part.clear();
            split = true;
          }
          part.push_back(cell[idx[i]]);
        }
        next.push_back(std::move(part));
      }
      cells = std::move(next);
      if (!split) break;
    }
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (Point x : cells[c]) cell_of[x] = static_cast<std::uint32_t>(c);
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 1099511628211ULL;
    };
    for (const auto& cell : cells) {
      mix(cell.size());
      for (std::uint64_t v : signature(cell[0], cell_of)) mix(v);
    }
    return h;
  }

  static bool discrete(const Cells& cells) {
    return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.size() == 1; });
  }

  // First smallest non-singleton cell.
  static std::size_t target(const Cells& cells) {
    std::size_t best = cells.size();
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (cells[c].size() > 1 && (best == cells.size() || cells[c].size() < cells[best].size()))
        best = c;
    return best;
  }

  static Cells individualize(const Cells& cells, std::size_t t, Point w) {
    Cells out;
    out.reserve(cells.size() + 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c != t) {
        out.push_back(cells[c]);
        continue;
      }
      out.push_back({w});
      std::vector<Point> rest;
      for (Point x : cells[c])
        if (x != w) rest.push_back(x);
      out.push_back(std::move(rest));
    }
    return out;
  }

  static std::vector<Point> leaf_order(const Cells& cells) {
    std::vector<Point> o;
    for (const auto& c : cells) o.push_back(c[0]);
    return o;
  }

  std::vector<std::uint32_t> relabel(const std::vector<Point>& order) const {
    std::vector<std::uint32_t> out(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] = m_.at(order[i], order[j]);
    return out;
  }

 private:
  std::vector<std::uint64_t> signature(Point x, const std::vector<std::uint32_t>& cell_of) const {
    std::vector<std::uint64_t> s(n_);
    for (Point y = 0; y < n_; ++y)
      s[y] = static_cast<std::uint64_t>(cell_of[y]) * codes_ + pair_code_[x * n_ + y];
    std::sort(s.begin(), s.end());
    return s;
  }

  const ColorMatrix& m_;
  std::size_t n_;
  SearchLimits limits_;
  std::uint64_t nodes_ = 0;
  std::size_t codes_ = 0;
  std::vector<std::uint32_t> pair_code_;
};

// The map sending the i-th point of `from` to the i-th point of `to`.
Permutation matching(const std::vector<Point>& from, const std::vector<Point>& to) {
  std::vector<Point> img(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) img[from[i]] = to[i];
  return Permutation(std::move(img));
}

struct PathNode {
  Cells cells;
  std::uint64_t inv = 0;
  std::size_t target = 0;
};

class AutSearch {
 public:
  AutSearch(const ColorMatrix& m, SearchLimits limits) : m_(m), e_(m, limits) {}

  std::vector<Permutation> run(const std::vector<Permutation>& hints) {
    const std::size_t n = e_.size();
    if (n == 0) return {};
    PathNode node;
    node.cells = e_.root();
    node.inv = e_.refine(node.cells);
    for (;;) {
      if (Engine::discrete(node.cells)) break;
      node.target = Engine::target(node.cells);
      path_.push_back(node);
      Point u = node.cells[node.target][0];
      fixed_.push_back(u);
      PathNode child;
      child.cells = Engine::individualize(node.cells, node.target, u);
      child.inv = e_.refine(child.cells);
      node = std::move(child);
    }
    leaf_inv_ = node.inv;
    first_order_ = Engine::leaf_order(node.cells);
    first_form_ = e_.relabel(first_order_);

    for (const auto& h : hints) {
      if (h.is_identity() || !m_.preserved_by(h)) continue;
      std::size_t lv = 0;
      while (lv < fixed_.size() && h(fixed_[lv]) == fixed_[lv]) ++lv;
      add(h, lv);
    }

    for (std::size_t k = path_.size(); k-- > 0;) {
      const PathNode& pn = path_[k];
      for (Point w : pn.cells[pn.target]) {
        if (in_orbit(k, w)) continue;
        Cells child = Engine::individualize(pn.cells, pn.target, w);
        if (auto g = descend(std::move(child), k + 1)) add(*g, k);
      }
    }
    std::vector<Permutation> out;
    for (const auto& [g, lv] : gens_) out.push_back(g);
    return out;
  }

 private:
  void add(const Permutation& g, std::size_t level) {
    gens_.emplace_back(g, level);
    orbit_cache_.clear();
  }

  // Orbit of the first-path vertex at `level` under the generators fixing
  // the earlier first-path vertices.
  bool in_orbit(std::size_t level, Point w) {
    auto it = orbit_cache_.find(level);
    if (it == orbit_cache_.end()) {
      std::vector<Permutation> g;
      for (const auto& [p, lv] : gens_)
        if (lv >= level) g.push_back(p);
      auto orb = generated_orbit(e_.size(), g, fixed_[level]);
      std::vector<bool> mark(e_.size(), false);
      for (Point x : orb) mark[x] = true;
      it = orbit_cache_.emplace(level, std::move(mark)).first;
    }
    return it->second[w];
  }

  // Looks below a node at `depth` for a leaf equivalent to the first leaf.
  std::optional<Permutation> descend(Cells cells, std::size_t depth) {
    e_.count_node();
    std::uint64_t inv = e_.refine(cells);
    bool on_leaf_depth = depth == path_.size();
    if (inv != (on_leaf_depth ? leaf_inv_ : path_[depth].inv)) return std::nullopt;
    if (Engine::discrete(cells) != on_leaf_depth) return std::nullopt;
    if (on_leaf_depth) {
      auto order = Engine::leaf_order(cells);
      if (e_.relabel(order) != first_form_) return std::nullopt;
      return matching(first_order_, order);
    }
    std::size_t t = Engine::target(cells);
    if (t != path_[depth].target) return std::nullopt;
    for (Point w : cells[t])
      if (auto g = descend(Engine::individualize(cells, t, w), depth + 1)) return g;
    return std::nullopt;
  }

  const ColorMatrix& m_;
  Engine e_;
  std::vector<PathNode> path_;
  std::vector<Point> fixed_;
  std::uint64_t leaf_inv_ = 0;
  std::vector<Point> first_order_;
  std::vector<std::uint32_t> first_form_;
  std::vector<std::pair<Permutation, std::size_t>> gens_;
  std::map<std::size_t, std::vector<bool>> orbit_cache_;
};

class CanonSearch {
 public:
  CanonSearch(const ColorMatrix& m, SearchLimits limits) : e_(m, limits) {}

  CanonicalLabeling run(const PermutationGroup& aut) {
    Cells cells = e_.root();
    std::vector<std::uint64_t> invs{e_.refine(cells)};
    visit(std::move(cells), invs, aut);
    std::vector<Point> lab(e_.size());
    for (std::size_t i = 0; i < best_order_.size(); ++i) lab[best_order_[i]] = static_cast<Point>(i);
    return {Permutation(std::move(lab)), std::move(best_form_)};
  }

 private:
  // -1, 0, +1 as the invariant path sorts before, level with, or after the
  // best path so far; a longer path that ties on the shared part sorts after.
  int compare(const std::vector<std::uint64_t>& invs) const {
    if (!have_best_) return -1;
    std::size_t k = std::min(invs.size(), best_invs_.size());
    for (std::size_t i = 0; i < k; ++i)
      if (invs[i] != best_invs_[i]) return invs[i] < best_invs_[i] ? -1 : 1;
    return invs.size() > best_invs_.size() ? 1 : 0;
  }

  void visit(Cells cells, std::vector<std::uint64_t>& invs, const PermutationGroup& stab) {
    e_.count_node();
    int c = compare(invs);
    if (c > 0) return;
    if (Engine::discrete(cells)) {
      auto order = Engine::leaf_order(cells);
      auto form = e_.relabel(order);
      if (c < 0 || invs.size() < best_invs_.size() || form < best_form_) {
        have_best_ = true;
        best_invs_ = invs;
        best_form_ = std::move(form);
        best_order_ = std::move(order);
      }
      return;
    }
    std::size_t t = Engine::target(cells);
    std::vector<bool> done(e_.size(), false);
    for (Point w : cells[t]) {
      if (done[w]) continue;
      for (Point x : stab.orbit(w)) done[x] = true;
      Cells child = Engine::individualize(cells, t, w);
      invs.push_back(e_.refine(child));
      PermutationGroup next = stab.is_trivial() ? stab : stab.point_stabilizer(w);
      visit(std::move(child), invs, next);
      invs.pop_back();
    }
  }

  Engine e_;
  bool have_best_ = false;
  std::vector<std::uint64_t> best_invs_;
  std::vector<std::uint32_t> best_form_;
  std::vector<Point> best_order_;
};

}  // namespace

std::vector<Permutation> automorphism_generators(const ColorMatrix& m,
                                                 const std::vector<Permutation>& hints,
                                                 SearchLimits limits) {
  AutSearch s(m, limits);
  return s.run(hints);
}

CanonicalLabeling canonical_labeling(const ColorMatrix& m, const PermutationGroup& aut,
                                     SearchLimits limits) {
  if (aut.degree() != m.size()) throw std::invalid_argument("group degree does not match matrix");
  CanonSearch s(m, limits);
  return s.run(aut);
}

}  // namespace ciforge
