#include "ciforge/perm.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ciforge {

Permutation::Permutation(std::size_t degree) : images_(degree) {
  std::iota(images_.begin(), images_.end(), Point{0});
}

Permutation::Permutation(std::vector<Point> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (Point y : images_) {
    if (y >= images_.size() || seen[y])
      throw std::invalid_argument("permutation images are not a bijection");
    seen[y] = true;
  }
}

Permutation Permutation::from_cycles(std::size_t degree,
                                     const std::vector<std::vector<Point>>& cycles) {
  std::vector<Point> img(degree);
  std::iota(img.begin(), img.end(), Point{0});
  std::vector<bool> used(degree, false);
  for (const auto& c : cycles) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] >= degree || used[c[i]])
        throw std::invalid_argument("cycles are not disjoint or out of range");
      used[c[i]] = true;
      img[c[i]] = c[(i + 1) % c.size()];
    }
  }
  return Permutation::unchecked(std::move(img));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i) return false;
  return true;
}

Point Permutation::first_moved() const noexcept {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i) return static_cast<Point>(i);
  return static_cast<Point>(images_.size());
}

std::size_t Permutation::fixed_point_count() const noexcept {
  std::size_t k = 0;
  for (std::size_t i = 0; i < images_.size(); ++i) k += images_[i] == i;
  return k;
}

std::vector<std::vector<Point>> Permutation::cycles() const {
  std::vector<std::vector<Point>> out;
  std::vector<bool> seen(images_.size(), false);
  for (Point x = 0; x < images_.size(); ++x) {
    if (seen[x] || images_[x] == x) continue;
    std::vector<Point> c;
    for (Point y = x; !seen[y]; y = images_[y]) {
      seen[y] = true;
      c.push_back(y);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::uint64_t Permutation::order() const {
  std::uint64_t l = 1;
  for (const auto& c : cycles()) l = std::lcm(l, static_cast<std::uint64_t>(c.size()));
  return l;
}

bool Permutation::is_even() const {
  std::size_t transpositions = 0;
  for (const auto& c : cycles()) transpositions += c.size() - 1;
  return transpositions % 2 == 0;
}

std::string Permutation::to_cycle_string() const {
  auto cs = cycles();
  if (cs.empty()) return "()";
  std::ostringstream os;
  for (const auto& c : cs) {
    os << '(';
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i];
    os << ')';
  }
  return os.str();
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.degree() != b.degree())
    throw std::invalid_argument("compose: degree mismatch");
  std::vector<Point> img(a.degree());
  for (Point x = 0; x < img.size(); ++x) img[x] = a(b(x));
  return Permutation::unchecked(std::move(img));
}

Permutation inverse(const Permutation& a) {
  std::vector<Point> img(a.degree());
  for (Point x = 0; x < img.size(); ++x) img[a(x)] = x;
  return Permutation::unchecked(std::move(img));
}

Permutation conjugate(const Permutation& g, const Permutation& x) {
  return compose(inverse(x), compose(g, x));
}

Permutation power(const Permutation& g, long long k) {
  Permutation base = k < 0 ? inverse(g) : g;
  unsigned long long e = k < 0 ? static_cast<unsigned long long>(-k)
                               : static_cast<unsigned long long>(k);
  Permutation result(g.degree());
  while (e) {
    if (e & 1) result = compose(result, base);
    base = compose(base, base);
    e >>= 1;
  }
  return result;
}

bool commute(const Permutation& a, const Permutation& b) {
  if (a.degree() != b.degree()) return false;
  for (Point x = 0; x < a.degree(); ++x)
    if (a(b(x)) != b(a(x))) return false;
  return true;
}

std::size_t PermutationHash::operator()(const Permutation& g) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (Point y : g.images()) h = (h ^ y) * 1099511628211ull;
  return h;
}

}  // namespace ciforge
