#include "ciforge/two_closure.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ciforge/ea_structure.hpp"

namespace ciforge {

OrbitalPartition::OrbitalPartition(const PermutationGroup& g)
    : OrbitalPartition(g.degree(), g.generators()) {}

OrbitalPartition::OrbitalPartition(std::size_t degree, const std::vector<Permutation>& gens)
    : n_(degree) {
  const std::size_t pairs = n_ * n_;
  std::vector<std::size_t> parent(pairs);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& s : gens) {
    if (s.degree() != n_) throw std::invalid_argument("generator degree mismatch");
    for (Point a = 0; a < n_; ++a)
      for (Point b = 0; b < n_; ++b) {
        std::size_t u = find(a * n_ + b), v = find(s(a) * n_ + s(b));
        if (u != v) parent[std::max(u, v)] = std::min(u, v);
      }
  }
  color_.resize(pairs);
  std::vector<std::uint32_t> color_of_root(pairs, UINT32_MAX);
  for (std::size_t k = 0; k < pairs; ++k) {
    std::size_t r = find(k);
    if (color_of_root[r] == UINT32_MAX) color_of_root[r] = static_cast<std::uint32_t>(count_++);
    color_[k] = color_of_root[r];
  }
}

OrbitalPartition orbitals(const PermutationGroup& g) { return OrbitalPartition(g); }

bool in_two_closure(const OrbitalPartition& o, const Permutation& x) {
  if (x.degree() != o.degree()) throw std::invalid_argument("permutation degree mismatch");
  for (Point a = 0; a < o.degree(); ++a)
    for (Point b = 0; b < o.degree(); ++b)
      if (o.color_of(x(a), x(b)) != o.color_of(a, b)) return false;
  return true;
}

bool in_two_closure(const PermutationGroup& g, const Permutation& x) {
  return in_two_closure(orbitals(g), x);
}

PermutationGroup two_closure(const PermutationGroup& g) {
  if (g.degree() > point_cap())
    throw std::invalid_argument("degree above the point cap; use membership checks instead");
  OrbitalPartition o(g);
  return PermutationGroup(g.degree(), automorphism_generators(o.color_matrix(), g.generators()));
}

std::string format_orbitals(const OrbitalPartition& o) {
  std::vector<std::vector<std::pair<Point, Point>>> by_color(o.orbital_count());
  for (Point a = 0; a < o.degree(); ++a)
    for (Point b = 0; b < o.degree(); ++b) by_color[o.color_of(a, b)].emplace_back(a, b);
  std::ostringstream out;
  for (std::size_t k = 0; k < by_color.size(); ++k) {
    out << "orbital " << k << ":";
    for (auto [a, b] : by_color[k]) out << " (" << a << "," << b << ")";
    out << "\n";
  }
  return out.str();
}

}  // namespace ciforge
