#pragma once

// Line-oriented text formats shared by every module.
//
//   perm N: i0 i1 ... i(N-1)      0-indexed images
//   set p n: m1 m2 ...            connection set as ascending point codes
//   vec p n: c0,c1,...,c(n-1)     one F_p^n vector (or a bare point code)

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ciforge/perm.hpp"

namespace ciforge {

std::string format_permutation(const Permutation& g);
/// Throws ParseError on malformed or non-bijective input.
Permutation parse_permutation(std::string_view line);
/// Reads every `perm` record in a stream, skipping blank and '#' lines.
std::vector<Permutation> read_permutations(std::istream& in);

struct ConnectionSetRecord {
  unsigned p = 0;
  unsigned n = 0;
  std::vector<Point> members;
};

std::string format_connection_set(const ConnectionSetRecord& s);
ConnectionSetRecord parse_connection_set(std::string_view line);

/// Parses `vec p n: c0,...` or a bare integer point code into a point of F_p^n.
Point parse_vector(std::string_view line, unsigned p, unsigned n);
std::string format_vector(Point x, unsigned p, unsigned n);

}  // namespace ciforge
