#include "ciforge/cayley.hpp"

#include <bit>
#include <stdexcept>

namespace ciforge {

Digraph::Digraph(std::size_t n) : n_(n), words_((n + 63) / 64), rows_(n * words_, 0) {}

std::size_t Digraph::arc_count() const {
  std::size_t c = 0;
  for (auto w : rows_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

Digraph Digraph::relabeled(const Permutation& pi) const {
  if (pi.degree() != n_) throw std::invalid_argument("relabeling has wrong degree");
  Digraph out(n_);
  for (Point x = 0; x < n_; ++x)
    for (Point y = 0; y < n_; ++y)
      if (has_arc(x, y)) out.add_arc(pi(x), pi(y));
  return out;
}

bool Digraph::preserved_by(const Permutation& g) const {
  if (g.degree() != n_) return false;
  for (Point x = 0; x < n_; ++x)
    for (Point y = 0; y < n_; ++y)
      if (has_arc(x, y) && !has_arc(g(x), g(y))) return false;
  return true;
}

ColorMatrix Digraph::color_matrix() const {
  std::vector<std::uint32_t> c(n_ * n_);
  for (Point x = 0; x < n_; ++x)
    for (Point y = 0; y < n_; ++y) c[x * n_ + y] = has_arc(x, y) ? 1 : 0;
  return ColorMatrix(n_, std::move(c));
}

ConnectionSet connection_set_from_mask(unsigned p, unsigned n, std::uint64_t mask) {
  ConnectionSet s{p, n, {}};
  for (Point x = 0; x < 64; ++x)
    if ((mask >> x) & 1u) s.members.push_back(x);
  return s;
}

CayleyDigraph build_cayley(const FpSpace& space, const ConnectionSet& s) {
  if (s.p != space.p() || s.n != space.n())
    throw std::invalid_argument("connection set is for a different group");
  std::vector<bool> in(space.size(), false);
  for (Point m : s.members) {
    if (m >= space.size()) throw std::invalid_argument("connection set member out of range");
    in[m] = true;
  }
  CayleyDigraph d{space.p(), space.n(), s, Digraph(space.size())};
  for (Point x = 0; x < space.size(); ++x)
    for (Point y = 0; y < space.size(); ++y)
      if (in[space.sub(y, x)]) d.graph.add_arc(x, y);
  return d;
}

CayleyDigraph build_cayley(unsigned p, unsigned n, const ConnectionSet& s) {
  return build_cayley(FpSpace(p, n), s);
}

PermutationGroup automorphism_group(const Digraph& d, const std::vector<Permutation>& hints) {
  return PermutationGroup(d.size(), automorphism_generators(d.color_matrix(), hints));
}

namespace {

std::vector<Permutation> translations(unsigned p, unsigned n) {
  FpSpace s(p, n);
  std::vector<Permutation> t;
  for (unsigned i = 0; i < n; ++i) t.push_back(s.translation(s.unit(i)));
  return t;
}

}  // namespace

PermutationGroup automorphism_group(const CayleyDigraph& d) {
  return automorphism_group(d.graph, translations(d.p, d.n));
}

std::string canonical_form(const Digraph& d, const PermutationGroup& aut) {
  CanonicalLabeling c = canonical_labeling(d.color_matrix(), aut);
  static const char* hex = "0123456789abcdef";
  std::string out;
  unsigned acc = 0, bits = 0;
  for (std::uint32_t v : c.form) {
    acc = (acc << 1) | (v & 1u);
    if (++bits == 4) {
      out.push_back(hex[acc]);
      acc = bits = 0;
    }
  }
  if (bits) out.push_back(hex[acc << (4 - bits)]);
  return out;
}

std::string canonical_form(const Digraph& d) { return canonical_form(d, automorphism_group(d)); }

std::string canonical_form(const CayleyDigraph& d) {
  return canonical_form(d.graph, automorphism_group(d));
}

std::optional<Permutation> are_isomorphic(const Digraph& d1, const Digraph& d2) {
  if (d1.size() != d2.size()) throw std::invalid_argument("digraphs have different sizes");
  if (d1.arc_count() != d2.arc_count()) return std::nullopt;
  ColorMatrix m1 = d1.color_matrix(), m2 = d2.color_matrix();
  CanonicalLabeling c1 = canonical_labeling(m1, automorphism_group(d1));
  CanonicalLabeling c2 = canonical_labeling(m2, automorphism_group(d2));
  if (c1.form != c2.form) return std::nullopt;
  Permutation g = compose(inverse(c2.labeling), c1.labeling);
  if (d1.relabeled(g) != d2) throw std::logic_error("canonical labels disagree with arcs");
  return g;
}

}  // namespace ciforge
