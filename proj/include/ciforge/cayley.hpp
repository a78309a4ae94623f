#pragma once

// Cayley digraphs of Z_p^n and label-independent digraph comparison.

#include <optional>
#include <string>
#include <vector>

#include "ciforge/ea_structure.hpp"
#include "ciforge/perm_group.hpp"
#include "ciforge/refine_search.hpp"

namespace ciforge {

/// Arc set as bit rows; row x holds the out-neighbours of x.
class Digraph {
 public:
  explicit Digraph(std::size_t n = 0);

  std::size_t size() const noexcept { return n_; }
  bool has_arc(Point x, Point y) const {
    return (rows_[x * words_ + y / 64] >> (y % 64)) & 1u;
  }
  void add_arc(Point x, Point y) { rows_[x * words_ + y / 64] |= std::uint64_t{1} << (y % 64); }
  std::size_t arc_count() const;

  /// pi . D: arc (pi(x), pi(y)) for each arc (x, y).
  Digraph relabeled(const Permutation& pi) const;
  bool preserved_by(const Permutation& g) const;
  ColorMatrix color_matrix() const;

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> rows_;
};

struct ConnectionSet {
  unsigned p = 0, n = 0;
  std::vector<Point> members;  // ascending, distinct
};

/// Members of the bitmask `mask` over the p^n points (bit x set iff x in S).
ConnectionSet connection_set_from_mask(unsigned p, unsigned n, std::uint64_t mask);

struct CayleyDigraph {
  unsigned p = 0, n = 0;
  ConnectionSet connection_set;
  Digraph graph;
};

/// Arc (x, y) iff y - x lies in S. Throws std::invalid_argument if a member
/// is out of range.
CayleyDigraph build_cayley(unsigned p, unsigned n, const ConnectionSet& s);
CayleyDigraph build_cayley(const FpSpace& space, const ConnectionSet& s);

PermutationGroup automorphism_group(const Digraph& d, const std::vector<Permutation>& hints = {});
/// Seeds the search with the translations, which always preserve arcs.
PermutationGroup automorphism_group(const CayleyDigraph& d);

/// Lowercase hex of the canonically relabeled adjacency rows, N^2 bits
/// packed row-major, most significant bit first.
std::string canonical_form(const Digraph& d, const PermutationGroup& aut);
std::string canonical_form(const Digraph& d);
std::string canonical_form(const CayleyDigraph& d);

/// Some g with g . d1 = d2, if one exists. Throws on size mismatch.
std::optional<Permutation> are_isomorphic(const Digraph& d1, const Digraph& d2);

}  // namespace ciforge
