#include "ciforge/perm_group.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ciforge {

PermutationGroup::PermutationGroup(std::size_t degree) : degree_(degree) {}

PermutationGroup::PermutationGroup(std::size_t degree, std::vector<Permutation> generators,
                                   std::vector<Point> base_prefix,
                                   std::optional<GroupOrder> known_order)
    : degree_(degree), generators_(std::move(generators)) {
  for (const auto& g : generators_)
    if (g.degree() != degree_)
      throw std::invalid_argument("group generators have mixed degrees");
  for (Point b : base_prefix) {
    if (b >= degree_) throw std::invalid_argument("base point out of range");
    add_level(b);
  }
  for (const auto& g : generators_) {
    if (g.is_identity()) continue;
    if (std::find(strong_.begin(), strong_.end(), g) != strong_.end()) continue;
    strong_.push_back(g);
  }
  schreier_sims(known_order);
}

void PermutationGroup::add_level(Point base_point) {
  Level lv;
  lv.base_point = base_point;
  lv.position.assign(degree_, -1);
  lv.orbit.push_back(base_point);
  lv.position[base_point] = 0;
  lv.transversal.push_back(Permutation::identity(degree_));
  lv.transversal_inv.push_back(Permutation::identity(degree_));
  lv.checked.push_back(0);
  levels_.push_back(std::move(lv));
}

void PermutationGroup::extend_orbit(Level& lv) {
  for (std::size_t i = 0; i < lv.orbit.size(); ++i) {
    Point d = lv.orbit[i];
    for (std::size_t gi : lv.gens) {
      const Permutation& s = strong_[gi];
      Point e = s(d);
      if (lv.position[e] >= 0) continue;
      lv.position[e] = static_cast<int>(lv.orbit.size());
      lv.orbit.push_back(e);
      Permutation u = compose(s, lv.transversal[i]);
      lv.transversal_inv.push_back(inverse(u));
      lv.transversal.push_back(std::move(u));
      lv.checked.push_back(0);
    }
  }
}

std::pair<Permutation, std::size_t> PermutationGroup::sift(Permutation h,
                                                           std::size_t from) const {
  for (std::size_t l = from; l < levels_.size(); ++l) {
    const Level& lv = levels_[l];
    int pos = lv.position[h(lv.base_point)];
    if (pos < 0) return {std::move(h), l};
    h = compose(lv.transversal_inv[pos], h);
  }
  return {std::move(h), levels_.size()};
}

void PermutationGroup::schreier_sims(const std::optional<GroupOrder>& known_order) {
  // Every strong generator must move some base point.
  for (const auto& s : strong_) {
    bool moves = false;
    for (const auto& lv : levels_) moves = moves || !s.fixes(lv.base_point);
    if (!moves) add_level(s.first_moved());
  }
  for (std::size_t gi = 0; gi < strong_.size(); ++gi) {
    for (auto& lv : levels_) {
      lv.gens.push_back(gi);
      if (!strong_[gi].fixes(lv.base_point)) break;
    }
  }
  for (auto& lv : levels_) extend_orbit(lv);

  auto reached = [&] { return known_order && order() == *known_order; };

  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(levels_.size()) - 1;
  while (i >= 0) {
    if (reached()) break;
    Level& lv = levels_[i];
    bool found = false;
    std::size_t d = 0, gi = 0;
    for (; d < lv.orbit.size(); ++d) {
      if (lv.checked[d] < lv.gens.size()) {
        gi = lv.gens[lv.checked[d]++];
        found = true;
        break;
      }
    }
    if (!found) {
      --i;
      continue;
    }
    const Permutation& s = strong_[gi];
    Point img = s(lv.orbit[d]);
    Permutation h =
        compose(lv.transversal_inv[lv.position[img]], compose(s, lv.transversal[d]));
    auto [residue, j] = sift(std::move(h), static_cast<std::size_t>(i) + 1);
    if (residue.is_identity()) continue;
    if (j == levels_.size()) add_level(residue.first_moved());
    std::size_t idx = strong_.size();
    strong_.push_back(std::move(residue));
    for (std::size_t l = 0; l <= j; ++l) {
      levels_[l].gens.push_back(idx);
      extend_orbit(levels_[l]);
    }
    i = static_cast<std::ptrdiff_t>(j);
  }
}

std::vector<Point> PermutationGroup::base() const {
  std::vector<Point> b;
  for (const auto& lv : levels_) b.push_back(lv.base_point);
  return b;
}

GroupOrder PermutationGroup::order() const {
  GroupOrder o = 1;
  for (const auto& lv : levels_) o *= lv.orbit.size();
  return o;
}

bool PermutationGroup::contains(const Permutation& g) const {
  if (g.degree() != degree_) return false;
  return sift(g, 0).first.is_identity();
}

std::vector<Point> PermutationGroup::orbit(Point x) const {
  return generated_orbit(degree_, generators_, x);
}

std::vector<std::vector<Point>> PermutationGroup::orbits() const {
  std::vector<std::vector<Point>> out;
  std::vector<bool> seen(degree_, false);
  for (Point x = 0; x < degree_; ++x) {
    if (seen[x]) continue;
    auto o = orbit(x);
    for (Point y : o) seen[y] = true;
    out.push_back(std::move(o));
  }
  return out;
}

bool PermutationGroup::is_transitive() const {
  return degree_ == 0 || orbit(0).size() == degree_;
}

PermutationGroup PermutationGroup::with_base_prefix(std::vector<Point> prefix) const {
  return PermutationGroup(degree_, strong_, std::move(prefix), order());
}

PermutationGroup PermutationGroup::pointwise_stabilizer(std::span<const Point> points) const {
  std::vector<Point> prefix(points.begin(), points.end());
  PermutationGroup chain = with_base_prefix(prefix);
  std::vector<Permutation> gens;
  GroupOrder o = 1;
  if (chain.levels_.size() > prefix.size()) {
    for (std::size_t gi : chain.levels_[prefix.size()].gens) gens.push_back(chain.strong_[gi]);
    for (std::size_t l = prefix.size(); l < chain.levels_.size(); ++l)
      o *= chain.levels_[l].orbit.size();
  }
  std::vector<Point> rest;
  for (std::size_t l = prefix.size(); l < chain.levels_.size(); ++l)
    rest.push_back(chain.levels_[l].base_point);
  return PermutationGroup(degree_, std::move(gens), std::move(rest), o);
}

PermutationGroup PermutationGroup::point_stabilizer(Point v) const {
  Point pts[1] = {v};
  return pointwise_stabilizer(pts);
}

PermutationGroup PermutationGroup::conjugate(const Permutation& x) const {
  std::vector<Permutation> gens;
  for (const auto& g : generators_) gens.push_back(ciforge::conjugate(g, x));
  return PermutationGroup(degree_, std::move(gens), {}, order());
}

Permutation PermutationGroup::random_element(std::mt19937_64& rng) const {
  Permutation g = Permutation::identity(degree_);
  for (const auto& lv : levels_) {
    std::uniform_int_distribution<std::size_t> pick(0, lv.orbit.size() - 1);
    g = compose(g, lv.transversal[pick(rng)]);
  }
  return g;
}

std::vector<Permutation> PermutationGroup::elements(std::size_t limit) const {
  if (order() > limit) throw std::length_error("group too large to enumerate");
  std::vector<Permutation> out{Permutation::identity(degree_)};
  for (auto it = levels_.rbegin(); it != levels_.rend(); ++it) {
    std::vector<Permutation> next;
    next.reserve(out.size() * it->orbit.size());
    for (const auto& u : it->transversal)
      for (const auto& g : out) next.push_back(compose(u, g));
    out = std::move(next);
  }
  return out;
}

std::vector<Point> generated_orbit(std::size_t degree, const std::vector<Permutation>& gens,
                                   Point x) {
  std::vector<bool> seen(degree, false);
  std::vector<Point> orb{x};
  seen[x] = true;
  for (std::size_t i = 0; i < orb.size(); ++i)
    for (const auto& g : gens) {
      Point y = g(orb[i]);
      if (!seen[y]) {
        seen[y] = true;
        orb.push_back(y);
      }
    }
  std::sort(orb.begin(), orb.end());
  return orb;
}

std::vector<std::size_t> generated_congruence(std::size_t degree,
                                              const std::vector<Permutation>& gens,
                                              const std::vector<Point>& seed) {
  std::vector<std::size_t> parent(degree);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  };
  std::vector<std::pair<Point, Point>> queue;
  for (std::size_t i = 1; i < seed.size(); ++i)
    if (unite(seed[0], seed[i])) queue.emplace_back(seed[0], seed[i]);
  while (!queue.empty()) {
    auto [a, b] = queue.back();
    queue.pop_back();
    for (const auto& s : gens) {
      Point x = s(a), y = s(b);
      if (unite(x, y)) queue.emplace_back(x, y);
    }
  }
  std::vector<std::size_t> labels(degree);
  for (std::size_t x = 0; x < degree; ++x) labels[x] = find(x);
  return labels;
}

std::vector<Point> minimal_block(std::size_t degree, const std::vector<Permutation>& gens,
                                 const std::vector<Point>& seed) {
  auto labels = generated_congruence(degree, gens, seed);
  std::vector<Point> blk;
  for (Point x = 0; x < degree; ++x)
    if (labels[x] == labels[seed.front()]) blk.push_back(x);
  return blk;
}

PermutationGroup group_from_generators(std::size_t degree, std::vector<Permutation> gens) {
  return PermutationGroup(degree, std::move(gens));
}

std::vector<Point> orbit(const PermutationGroup& g, Point x) { return g.orbit(x); }

PermutationGroup point_stabilizer(const PermutationGroup& g, Point v) {
  return g.point_stabilizer(v);
}

PermutationGroup conjugate_subgroup(const PermutationGroup& g, const Permutation& x) {
  return g.conjugate(x);
}

bool is_prime(unsigned long long p) {
  if (p < 2) return false;
  for (unsigned long long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

bool is_prime_power_of(const GroupOrder& order, unsigned p) {
  if (order < 1) return false;
  GroupOrder o = order;
  while (o > 1) {
    if (o % p != 0) return false;
    o /= p;
  }
  return true;
}


namespace {

bool is_primitive(std::size_t degree, const std::vector<Permutation>& gens) {
  for (Point w = 1; w < degree; ++w)
    if (minimal_block(degree, gens, {0, w}).size() != degree) return false;
  return true;
}

GroupOrder factorial(std::size_t n) {
  GroupOrder f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// A cycle of prime length q with degree/2 < q <= degree - 3 in the cycle type
// of g means a power of g is a q-cycle.
bool has_jordan_cycle(const Permutation& g) {
  const std::size_t n = g.degree();
  for (const auto& c : g.cycles()) {
    std::size_t q = c.size();
    if (2 * q > n && q + 3 <= n && is_prime(q)) return true;
  }
  return false;
}

}  // namespace

bool contains_alternating(std::size_t degree, const std::vector<Permutation>& gens) {
  if (degree <= 2) return true;
  if (degree <= 12) {
    PermutationGroup g(degree, gens);
    return g.order() >= factorial(degree) / 2;
  }
  if (generated_orbit(degree, gens, 0).size() != degree) return false;
  if (!is_primitive(degree, gens)) return false;
  std::mt19937_64 rng(0x5eed'c1f0'2024ULL);
  std::vector<Permutation> state;
  for (const auto& s : gens)
    if (!s.is_identity()) state.push_back(s);
  if (state.empty()) return false;
  for (std::size_t k = 0; state.size() < 10; ++k) state.push_back(state[k]);
  Permutation acc = Permutation::identity(degree);
  std::uniform_int_distribution<std::size_t> pick(0, state.size() - 1);
  bool found = false;
  for (int step = 0; step < 4000 && !found; ++step) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    state[i] = (rng() & 1) ? compose(state[i], state[j]) : compose(state[i], inverse(state[j]));
    acc = compose(acc, state[i]);
    if (step >= 50 && has_jordan_cycle(acc)) found = true;
  }
  if (!found) {
    PermutationGroup g(degree, gens);
    return g.order() >= factorial(degree) / 2;
  }
  // A q-cycle in a primitive group forces Alt(degree).
  return true;
}

MembershipOracle::MembershipOracle(std::size_t degree, std::vector<Permutation> gens)
    : degree_(degree), gens_(std::move(gens)) {
  for (const auto& s : gens_) all_even_ = all_even_ && s.is_even();
  if (degree_ > 12) {
    giant_ = contains_alternating(degree_, gens_);
    if (!giant_) chain_.emplace(degree_, gens_);
  } else {
    chain_.emplace(degree_, gens_);
    giant_ = chain_->order() * 2 >= factorial(degree_);
  }
}

bool MembershipOracle::contains(const Permutation& g) const {
  if (g.degree() != degree_) return false;
  if (chain_) return chain_->contains(g);
  return !all_even_ || g.is_even();
}

GroupOrder MembershipOracle::order() const {
  if (chain_) return chain_->order();
  return all_even_ ? factorial(degree_) / 2 : factorial(degree_);
}

}  // namespace ciforge
