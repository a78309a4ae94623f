#include "ciforge/text_io.hpp"

#include <charconv>
#include <istream>
#include <sstream>

#include "ciforge/errors.hpp"

namespace ciforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

unsigned long long to_uint(std::string_view tok, std::string_view what) {
  unsigned long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
    throw ParseError("bad integer '" + std::string(tok) + "' in " + std::string(what));
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    s = trim(s);
    if (s.empty()) break;
    auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

// Splits "keyword a b: rest" into the header tokens after the keyword and rest.
std::pair<std::vector<std::string_view>, std::string_view> header(std::string_view line,
                                                                  std::string_view kw) {
  line = trim(line);
  if (line.substr(0, kw.size()) != kw)
    throw ParseError("expected '" + std::string(kw) + "' record");
  auto colon = line.find(':');
  if (colon == std::string_view::npos) throw ParseError("missing ':' in record");
  auto head = split(line.substr(kw.size(), colon - kw.size()), ' ');
  return {head, line.substr(colon + 1)};
}

}  // namespace

std::string format_permutation(const Permutation& g) {
  std::ostringstream os;
  os << "perm " << g.degree() << ":";
  for (Point y : g.images()) os << ' ' << y;
  return os.str();
}

Permutation parse_permutation(std::string_view line) {
  auto [head, rest] = header(line, "perm");
  if (head.size() != 1) throw ParseError("perm record needs exactly one size");
  auto n = to_uint(head[0], "perm size");
  std::vector<Point> img;
  for (auto tok : split(rest, ' ')) {
    if (tok.empty()) continue;
    img.push_back(static_cast<Point>(to_uint(tok, "perm image")));
  }
  if (img.size() != n) throw ParseError("perm record has wrong number of images");
  try {
    return Permutation(std::move(img));
  } catch (const std::invalid_argument&) {
    throw ParseError("perm record is not a bijection");
  }
}

std::vector<Permutation> read_permutations(std::istream& in) {
  std::vector<Permutation> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(parse_permutation(t));
  }
  return out;
}

std::string format_connection_set(const ConnectionSetRecord& s) {
  std::ostringstream os;
  os << "set " << s.p << ' ' << s.n << ":";
  for (Point m : s.members) os << ' ' << m;
  return os.str();
}

ConnectionSetRecord parse_connection_set(std::string_view line) {
  auto [head, rest] = header(line, "set");
  if (head.size() != 2) throw ParseError("set record needs p and n");
  ConnectionSetRecord r;
  r.p = static_cast<unsigned>(to_uint(head[0], "set p"));
  r.n = static_cast<unsigned>(to_uint(head[1], "set n"));
  for (auto tok : split(rest, ' ')) {
    if (tok.empty()) continue;
    r.members.push_back(static_cast<Point>(to_uint(tok, "set member")));
  }
  for (std::size_t i = 1; i < r.members.size(); ++i)
    if (r.members[i] <= r.members[i - 1])
      throw ParseError("set members must be strictly ascending");
  return r;
}

Point parse_vector(std::string_view line, unsigned p, unsigned n) {
  line = trim(line);
  unsigned long long size = 1;
  for (unsigned i = 0; i < n; ++i) size *= p;
  if (line.substr(0, 3) != "vec") {
    auto v = to_uint(line, "point code");
    if (v >= size) throw ParseError("point code out of range");
    return static_cast<Point>(v);
  }
  auto [head, rest] = header(line, "vec");
  if (head.size() != 2 || to_uint(head[0], "vec p") != p || to_uint(head[1], "vec n") != n)
    throw ParseError("vec header does not match (p, n)");
  auto coords = split(rest, ',');
  if (coords.size() != n) throw ParseError("vec record has wrong number of coordinates");
  unsigned long long x = 0, scale = 1;
  for (auto tok : coords) {
    auto c = to_uint(tok, "vec coordinate");
    if (c >= p) throw ParseError("vec coordinate not reduced mod p");
    x += c * scale;
    scale *= p;
  }
  return static_cast<Point>(x);
}

std::string format_vector(Point x, unsigned p, unsigned n) {
  std::ostringstream os;
  os << "vec " << p << ' ' << n << ": ";
  for (unsigned i = 0; i < n; ++i) {
    os << (i ? "," : "") << (x % p);
    x /= p;
  }
  return os.str();
}

}  // namespace ciforge
