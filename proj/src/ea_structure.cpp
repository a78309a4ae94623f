#include "ciforge/ea_structure.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ciforge/errors.hpp"

namespace ciforge {

std::size_t point_cap() {
  if (const char* env = std::getenv("CIFORGE_POINT_CAP")) {
    try {
      std::size_t v = std::stoul(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return 81;
}

FpSpace::FpSpace(unsigned p, unsigned n, std::size_t cap) : p_(p), n_(n) {
  if (!is_prime(p)) throw std::invalid_argument("p = " + std::to_string(p) + " is not prime");
  if (n < 1) throw std::invalid_argument("rank n must be at least 1");
  powers_.push_back(1);
  for (unsigned i = 0; i < n; ++i) {
    powers_.push_back(powers_.back() * p);
    if (powers_.back() > cap)
      throw std::invalid_argument("p^n exceeds the point cap of " + std::to_string(cap));
  }
  size_ = powers_[n];
  add_.resize(size_ * size_);
  neg_.resize(size_);
  for (Point a = 0; a < size_; ++a) {
    for (Point b = 0; b < size_; ++b) {
      Point s = 0;
      for (unsigned i = 0; i < n; ++i)
        s += static_cast<Point>(((coord(a, i) + coord(b, i)) % p) * powers_[i]);
      add_[a * size_ + b] = s;
      if (s == 0) neg_[a] = b;
    }
  }
}

std::vector<unsigned> FpSpace::coords(Point x) const {
  std::vector<unsigned> c(n_);
  for (unsigned i = 0; i < n_; ++i) c[i] = coord(x, i);
  return c;
}

Point FpSpace::point(const std::vector<unsigned>& c) const {
  Point x = 0;
  for (unsigned i = 0; i < n_; ++i) x += static_cast<Point>((c[i] % p_) * powers_[i]);
  return x;
}

Point FpSpace::scale(Point a, long long k) const {
  long long m = ((k % p_) + p_) % p_;
  Point r = 0;
  for (long long i = 0; i < m; ++i) r = add(r, a);
  return r;
}

Permutation FpSpace::translation(Point t) const {
  std::vector<Point> img(size_);
  for (Point x = 0; x < size_; ++x) img[x] = add(x, t);
  return Permutation::unchecked(std::move(img));
}

std::optional<Point> FpSpace::as_translation(const Permutation& g) const {
  if (g.degree() != size_) return std::nullopt;
  Point t = g(0);
  for (Point x = 0; x < size_; ++x)
    if (g(x) != add(x, t)) return std::nullopt;
  return t;
}

Permutation FpSpace::linear_map(const std::vector<Point>& columns) const {
  std::vector<Point> img(size_);
  for (Point x = 0; x < size_; ++x) {
    Point y = 0;
    for (unsigned j = 0; j < n_; ++j) y = add(y, scale(columns[j], coord(x, j)));
    img[x] = y;
  }
  return Permutation(std::move(img));
}

std::vector<Point> FpSpace::span(const std::vector<Point>& vectors) const {
  std::vector<bool> in(size_, false);
  std::vector<Point> pts{0};
  in[0] = true;
  for (Point v : vectors) {
    std::size_t cur = pts.size();
    for (std::size_t i = 0; i < cur; ++i) {
      Point y = pts[i];
      for (unsigned k = 1; k < p_; ++k) {
        y = add(y, v);
        if (!in[y]) {
          in[y] = true;
          pts.push_back(y);
        }
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

PermutationGroup regular_rep(unsigned p, unsigned n) {
  FpSpace s(p, n);
  std::vector<Permutation> gens;
  for (unsigned i = 0; i < n; ++i) gens.push_back(s.translation(s.unit(i)));
  return PermutationGroup(s.size(), std::move(gens));
}

BlockSystem standard_blocks(unsigned p, unsigned n, unsigned level) {
  if (level > n) throw std::invalid_argument("block level out of range");
  FpSpace s(p, n);
  std::vector<std::size_t> labels(s.size());
  for (Point x = 0; x < s.size(); ++x) labels[x] = x / s.power(level);
  return BlockSystem::from_labels(labels);
}

PermutationGroup wreath_sylow(unsigned p, unsigned n) {
  FpSpace s(p, n);
  std::vector<Permutation> gens;
  // a_j adds e_j on the points whose coordinates above j are all zero.
  for (unsigned j = 0; j < n; ++j) {
    std::vector<Point> img(s.size());
    for (Point x = 0; x < s.size(); ++x)
      img[x] = (x / s.power(j + 1) == 0) ? s.add(x, s.unit(j)) : x;
    gens.push_back(Permutation(std::move(img)));
  }
  return PermutationGroup(s.size(), std::move(gens));
}

Permutation random_wreath_element(const FpSpace& s, std::mt19937_64& rng) {
  std::uniform_int_distribution<unsigned> digit(0, s.p() - 1);
  // shift[j][t]: added to coordinate j when the coordinates above j encode t.
  std::vector<std::vector<unsigned>> shift(s.n());
  for (unsigned j = 0; j < s.n(); ++j) {
    shift[j].resize(s.size() / s.power(j + 1));
    for (auto& v : shift[j]) v = digit(rng);
  }
  std::vector<Point> img(s.size());
  for (Point x = 0; x < s.size(); ++x) {
    auto c = s.coords(x);
    for (unsigned j = 0; j < s.n(); ++j) c[j] = (c[j] + shift[j][x / s.power(j + 1)]) % s.p();
    img[x] = s.point(c);
  }
  return Permutation(std::move(img));
}

RegularGroupTable::RegularGroupTable(std::size_t degree, const std::vector<Permutation>& gens,
                                     Point base)
    : base_(base), by_image_(degree) {
  std::vector<bool> have(degree, false);
  std::vector<Point> order{base};
  by_image_[base] = Permutation::identity(degree);
  have[base] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& g : gens) {
      if (g.degree() != degree) throw std::invalid_argument("generator degree mismatch");
      Permutation h = compose(g, by_image_[order[i]]);
      Point w = h(base);
      if (have[w]) {
        if (by_image_[w] != h) throw std::invalid_argument("group is not regular");
        continue;
      }
      have[w] = true;
      by_image_[w] = std::move(h);
      order.push_back(w);
    }
  }
  if (order.size() != degree) throw std::invalid_argument("group is not transitive");
}

bool RegularGroupTable::is_elementary_abelian(unsigned p) const {
  for (const auto& g : by_image_)
    if (!power(g, p).is_identity()) return false;
  for (const auto& a : by_image_)
    for (const auto& b : by_image_)
      if (!commute(a, b)) return false;
  return true;
}

Permutation regular_conjugator(const FpSpace& s, const RegularGroupTable& q) {
  if (q.size() != s.size()) throw std::invalid_argument("regular group has wrong order");
  // Pick an independent basis q_0.. of Q; y sends prod q_i^{c_i}(v) to sum c_i e_i.
  std::vector<Point> img(s.size());
  std::vector<bool> covered(s.size(), false);
  std::vector<Point> reached{q.base()};
  std::vector<Point> image_of_reached{0};
  covered[q.base()] = true;
  for (unsigned i = 0; i < s.n(); ++i) {
    Point w = 0;
    while (w < s.size() && covered[w]) ++w;
    if (w == s.size()) throw std::invalid_argument("regular group is not elementary abelian");
    const Permutation& gen = q.sending(w);
    std::size_t cur = reached.size();
    for (std::size_t k = 0; k < cur; ++k) {
      Point x = reached[k], tx = image_of_reached[k];
      for (unsigned e = 1; e < s.p(); ++e) {
        x = gen(x);
        tx = s.add(tx, s.unit(i));
        if (covered[x]) throw std::invalid_argument("regular group is not elementary abelian");
        covered[x] = true;
        reached.push_back(x);
        image_of_reached.push_back(tx);
      }
    }
  }
  for (std::size_t k = 0; k < reached.size(); ++k) img[reached[k]] = image_of_reached[k];
  Permutation y(std::move(img));
  return y;
}

namespace {

unsigned primitive_root(unsigned p) {
  for (unsigned g = 2; g < p; ++g) {
    unsigned x = 1, ord = 0;
    do {
      x = x * g % p;
      ++ord;
    } while (x != 1);
    if (ord == p - 1) return g;
  }
  return 1;
}

// Odd permutation that keeps R_L inside the standard wreath Sylow subgroup
// after conjugation: the transposition a_0 for p = 2, and a diagonal map
// normalizing R_L for odd p.
Permutation odd_corrector(const FpSpace& s) {
  if (s.p() == 2) return Permutation::from_cycles(s.size(), {{0, 1}});
  std::vector<Point> cols;
  for (unsigned j = 0; j < s.n(); ++j) cols.push_back(s.unit(j));
  cols[0] = s.scale(s.unit(0), primitive_root(s.p()));
  return s.linear_map(cols);
}

}  // namespace

SylowEmbedding sylow_embed(const FpSpace& s, const std::vector<Permutation>& q_gens,
                           std::uint64_t seed) {
  const std::size_t n = s.size();
  std::vector<Permutation> g_gens;
  for (unsigned i = 0; i < s.n(); ++i) g_gens.push_back(s.translation(s.unit(i)));
  g_gens.insert(g_gens.end(), q_gens.begin(), q_gens.end());

  MembershipOracle g(n, g_gens);
  SylowEmbedding out{Permutation::identity(n), q_gens, g.is_giant()};
  if (!g.is_giant() && is_prime_power_of(g.order(), s.p())) return out;

  GroupOrder sym_order = 1;
  for (std::size_t k = 2; k <= n; ++k) sym_order *= k;
  if (g.is_giant() || g.order() * 2 >= sym_order) {
    out.giant = true;
    RegularGroupTable q(n, q_gens);
    Permutation y = regular_conjugator(s, q);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    Permutation t = random_wreath_element(s, rng);
    Permutation c = compose(inverse(y), t);
    if (!g.contains(c)) {
      Permutation fix = odd_corrector(s);
      c = s.p() == 2 ? compose(c, fix) : compose(inverse(y), compose(fix, t));
    }
    if (!g.contains(c))
      throw ContractViolation("SYLOW", "parity correction did not land in <R, Q>");
    out.c = c;
    out.qc.clear();
    for (const auto& q0 : q_gens) out.qc.push_back(conjugate(q0, c));
    return out;
  }

  PermutationGroup chain(n, g_gens);
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 20000; ++attempt) {
    Permutation c = chain.random_element(rng);
    std::vector<Permutation> qc;
    for (const auto& q0 : q_gens) qc.push_back(conjugate(q0, c));
    std::vector<Permutation> h = qc;
    for (unsigned i = 0; i < s.n(); ++i) h.push_back(s.translation(s.unit(i)));
    if (is_prime_power_of(PermutationGroup(n, h).order(), s.p())) {
      out.c = c;
      out.qc = std::move(qc);
      return out;
    }
  }
  throw ContractViolation("SYLOW", "no conjugate of Q found inside a Sylow p-subgroup with R");
}

bool block_agreement_holds(const BlockSystem& blocks, const Permutation& tau,
                           const Permutation& tau_prime) {
  bool some = false, all = true;
  for (const auto& b : blocks.blocks()) {
    bool agree = true;
    for (Point x : b)
      if (blocks.block_of(tau(x)) != blocks.block_of(tau_prime(x))) {
        agree = false;
        break;
      }
    some = some || agree;
    all = all && agree;
  }
  return !some || all;
}

TauFamily define_taus(const FpSpace& s, const RegularGroupTable& q, Point v) {
  for (unsigned level = 1; level < s.n(); ++level) {
    BlockSystem b = standard_blocks(s.p(), s.n(), level);
    for (const auto& g : q.elements())
      if (!b.is_invariant_under(g))
        throw std::invalid_argument("Q does not admit the standard block systems");
  }
  TauFamily f;
  f.base_point = v;
  for (unsigned i = 0; i < s.n(); ++i) {
    f.taus.push_back(s.translation(s.unit(i)));
    f.tau_primes.push_back(q.sending(f.taus.back()(v)));
    BlockSystem b = standard_blocks(s.p(), s.n(), i);
    if (!block_agreement_holds(b, f.taus[i], f.tau_primes[i]))
      throw ContractViolation("L2_3", "tau'_" + std::to_string(i) +
                                          " agrees with tau_" + std::to_string(i) +
                                          " on one block but not all");
  }
  return f;
}

}  // namespace ciforge
