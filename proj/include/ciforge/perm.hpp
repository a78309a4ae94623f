#pragma once

// Permutations of the point set {0, ..., N-1}.
//
// Composition is right-to-left: compose(a, b)(x) == a(b(x)). Every formula
// elsewhere in the library reads as function application in this order, so
// x^-1 g x is written compose(inverse(x), compose(g, x)).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ciforge {

using Point = std::uint32_t;

class Permutation {
 public:
  Permutation() = default;

  /// Identity on `degree` points.
  explicit Permutation(std::size_t degree);

  /// Throws std::invalid_argument unless `images` is a bijection of [0, N).
  explicit Permutation(std::vector<Point> images);

  static Permutation identity(std::size_t degree) { return Permutation(degree); }

  /// Caller guarantees `images` is a bijection.
  static Permutation unchecked(std::vector<Point> images) {
    Permutation p;
    p.images_ = std::move(images);
    return p;
  }

  /// Builds from disjoint cycles, e.g. {{0, 1}, {2, 3}}.
  static Permutation from_cycles(std::size_t degree,
                                 const std::vector<std::vector<Point>>& cycles);

  std::size_t degree() const noexcept { return images_.size(); }
  Point operator()(Point x) const { return images_[x]; }
  std::span<const Point> images() const noexcept { return images_; }

  bool is_identity() const noexcept;
  bool fixes(Point x) const { return images_[x] == x; }
  /// Smallest moved point, or degree() for the identity.
  Point first_moved() const noexcept;
  std::size_t fixed_point_count() const noexcept;
  std::uint64_t order() const;
  bool is_even() const;
  std::vector<std::vector<Point>> cycles() const;

  /// Cycle notation, "()" for the identity.
  std::string to_cycle_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Point> images_;
};

/// compose(a, b)(x) = a(b(x)). Throws on degree mismatch.
Permutation compose(const Permutation& a, const Permutation& b);
Permutation inverse(const Permutation& a);
/// x^-1 g x.
Permutation conjugate(const Permutation& g, const Permutation& x);
/// g^k for any integer k.
Permutation power(const Permutation& g, long long k);
bool commute(const Permutation& a, const Permutation& b);

inline Permutation operator*(const Permutation& a, const Permutation& b) {
  return compose(a, b);
}

struct PermutationHash {
  std::size_t operator()(const Permutation& g) const noexcept;
};

}  // namespace ciforge
