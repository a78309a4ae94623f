#include "ciforge/conjugator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "ciforge/certificate.hpp"
#include "ciforge/errors.hpp"

namespace ciforge {

namespace {

constexpr std::string_view kTagNames[] = {"SYLOW", "L3_1",       "C3_2", "L4_1",
                                          "L5_3",  "L5_4_CASE2", "FINAL"};

std::uint64_t fingerprint_of(const std::vector<Permutation>& gens) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& g : gens)
    for (Point x : g.images()) {
      h ^= x;
      h *= 1099511628211ULL;
    }
  return h;
}

std::vector<Permutation> unit_translations(const FpSpace& s) {
  std::vector<Permutation> r;
  for (unsigned i = 0; i < s.n(); ++i) r.push_back(s.translation(s.unit(i)));
  return r;
}

// c in [0, p) with c * z = x, if x lies on the line through z.
std::optional<unsigned> line_coefficient(const FpSpace& s, Point z, Point x) {
  Point y = 0;
  for (unsigned c = 0; c < s.p(); ++c) {
    if (y == x) return c;
    y = s.add(y, z);
  }
  return std::nullopt;
}

// Blocks x + <z>.
BlockSystem line_blocks(const FpSpace& s, Point z) {
  std::vector<std::size_t> labels(s.size());
  for (Point x = 0; x < s.size(); ++x) {
    Point lo = x, y = x;
    for (unsigned c = 1; c < s.p(); ++c) lo = std::min(lo, y = s.add(y, z));
    labels[x] = lo;
  }
  return BlockSystem::from_labels(labels);
}

// Exponent c_B with g|_B = zeta^c on every block; nullopt if g is not of
// that form on some block.
std::optional<std::vector<unsigned>> block_exponents(const FpSpace& s, const BlockSystem& b,
                                                     Point z, const Permutation& g) {
  std::vector<unsigned> c(b.block_count());
  for (std::size_t k = 0; k < b.block_count(); ++k) {
    const auto& blk = b.block(k);
    Point x0 = blk.front();
    auto e = line_coefficient(s, z, s.sub(g(x0), x0));
    if (!e) return std::nullopt;
    Point shift = s.scale(z, *e);
    for (Point x : blk)
      if (g(x) != s.add(x, shift)) return std::nullopt;
    c[k] = *e;
  }
  return c;
}

void require(bool ok, const char* tag, const std::string& what) {
  if (!ok) throw ContractViolation(tag, what);
}

}  // namespace

std::string_view tag_name(StepTag t) { return kTagNames[static_cast<int>(t)]; }

StepTag parse_tag(std::string_view name) {
  for (int i = 0; i < 7; ++i)
    if (kTagNames[i] == name) return static_cast<StepTag>(i);
  throw ParseError("unknown step tag: " + std::string(name));
}

void PropertyLog::merge(const PropertyLog& o) {
  block_agreement += o.block_agreement;
  class_local += o.class_local;
  psi_membership += o.psi_membership;
  psi_conjugation += o.psi_conjugation;
  alpha_commutation += o.alpha_commutation;
  consistency_sum += o.consistency_sum;
  orbit_shape += o.orbit_shape;
  sim_symmetry += o.sim_symmetry;
  tau2_orbit += o.tau2_orbit;
  centrality += o.centrality;
  final_nodes += o.final_nodes;
  for (auto [k, v] : o.equiv2_class_counts) equiv2_class_counts[k] += v;
  for (const auto& [k, v] : o.routes) routes[k] += v;
}

std::vector<Permutation> conjugated_translations(const FpSpace& space, const Permutation& pi) {
  std::vector<Permutation> out;
  for (const auto& t : unit_translations(space)) out.push_back(conjugate(t, pi));
  return out;
}

EquivClasses equiv_classes(const PermutationGroup& g, const BlockSystem& b1) {
  if (!b1.is_invariant_under(g)) throw std::invalid_argument("block system is not G-invariant");
  // Blocks are equivalent iff their pointwise stabilizers in K coincide.
  // These stabilizers are conjugate in G, so inclusion already forces equality.
  PermutationGroup k = kernel_on_blocks(g, b1);
  const std::size_t m = b1.block_count();
  std::vector<PermutationGroup> fix;
  for (std::size_t i = 0; i < m; ++i) fix.push_back(k.pointwise_stabilizer(b1.block(i)));
  auto fixes_block = [&](const PermutationGroup& h, std::size_t i) {
    for (const auto& rho : h.generators())
      for (Point x : b1.block(i))
        if (!rho.fixes(x)) return false;
    return true;
  };
  std::vector<std::size_t> block_class(m, SIZE_MAX);
  std::vector<std::size_t> reps;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t c = 0; c < reps.size() && block_class[a] == SIZE_MAX; ++c)
      if (fixes_block(fix[a], reps[c])) block_class[a] = c;
    if (block_class[a] == SIZE_MAX) {
      block_class[a] = reps.size();
      reps.push_back(a);
    }
  }
  EquivClasses out;
  out.classes.resize(reps.size());
  out.class_of.resize(g.degree());
  for (Point x = 0; x < g.degree(); ++x) {
    out.class_of[x] = block_class[b1.block_of(x)];
    out.classes[out.class_of[x]].push_back(x);
  }
  return out;
}

Permutation class_local_element(const OrbitalPartition& o, const std::vector<Point>& e,
                                const Permutation& rho) {
  std::vector<Point> img(rho.degree());
  std::iota(img.begin(), img.end(), 0);
  for (Point x : e) img[x] = rho(x);
  Permutation local(std::move(img));
  require(in_two_closure(o, local), "L2_4", "class-local element leaves the 2-closure");
  return local;
}

PipelineState::PipelineState(const FpSpace& space, std::vector<Permutation> q_gens,
                             PropertyLog& log)
    : space_(space), q_gens_(std::move(q_gens)), log_(log) {
  rebuild();
}

void PipelineState::apply(const Permutation& psi) {
  for (auto& g : q_gens_) g = conjugate(g, psi);
  rebuild();
}

void PipelineState::rebuild() {
  const std::size_t n = space_.size();
  table_.emplace(n, q_gens_);
  std::vector<Permutation> gens = unit_translations(space_);
  gens.insert(gens.end(), q_gens_.begin(), q_gens_.end());
  group_ = PermutationGroup(n, gens);
  require(is_prime_power_of(group_.order(), space_.p()), "SYLOW", "<R, Q> is not a p-group");
  orbitals_ = OrbitalPartition(n, gens);
  try {
    taus_ = define_taus(space_, *table_);
  } catch (const std::invalid_argument& e) {
    throw ContractViolation("SYLOW", e.what());
  }
  log_.block_agreement += space_.n();
  require(taus_.tau_primes[0] == taus_.taus[0], "L2_3", "tau_0' differs from tau_0");
  stabilizer_.reset();
}

const PermutationGroup& PipelineState::vertex_stabilizer() {
  if (!stabilizer_) stabilizer_ = group_.point_stabilizer(0);
  return *stabilizer_;
}

std::uint64_t PipelineState::fingerprint() const {
  std::vector<Permutation> gens = unit_translations(space_);
  gens.insert(gens.end(), q_gens_.begin(), q_gens_.end());
  return fingerprint_of(gens);
}

void PipelineState::require_in_closure(const Permutation& psi, const char* tag) {
  require(in_two_closure(orbitals_, psi), tag, "conjugator leaves the 2-closure of G");
  ++log_.psi_membership;
}

// Finest grouping of blocks such that zeta applied to one group alone keeps
// every orbital colour. Blocks are linked when moving either one by zeta
// recolours a pair between them.
static std::vector<std::vector<std::size_t>> zeta_pieces(const OrbitalPartition& o,
                                                         const BlockSystem& b1,
                                                         const Permutation& zeta) {
  const std::size_t nb = b1.block_count();
  std::vector<std::size_t> root(nb);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = i + 1; j < nb; ++j) {
      if (find(i) == find(j)) continue;
      bool linked = false;
      for (Point a : b1.block(i)) {
        for (Point b : b1.block(j)) {
          linked = o.color_of(zeta(a), b) != o.color_of(a, b) || o.color_of(b, zeta(a)) != o.color_of(b, a) ||
                   o.color_of(a, zeta(b)) != o.color_of(a, b) || o.color_of(zeta(b), a) != o.color_of(b, a);
          if (linked) break;
        }
        if (linked) break;
      }
      if (linked) root[find(j)] = find(i);
    }
  std::vector<std::vector<std::size_t>> pieces;
  std::vector<std::size_t> index(nb, nb);
  for (std::size_t i = 0; i < nb; ++i) {
    std::size_t r = find(i);
    if (index[r] == nb) {
      index[r] = pieces.size();
      pieces.emplace_back();
    }
    pieces[index[r]].push_back(i);
  }
  return pieces;
}

Permutation fixing_blocks_psi(PipelineState& st, const Permutation& tau,
                              const Permutation& tau_prime, const BlockSystem& b1, Point z,
                              const std::vector<Permutation>& alphas) {
  const FpSpace& s = st.space();
  const unsigned p = s.p();
  Permutation zeta = s.translation(z);
  require(st.q_contains(zeta), "L3_1", "block generator is not in Q");
  Permutation g = compose(inverse(tau), tau_prime);
  if (!b1.is_fixed_by(g)) throw std::invalid_argument("tau^-1 tau' moves a block");

  // Normalize tau' so that g fixes v.
  auto c0 = line_coefficient(s, z, g(0));
  require(c0.has_value(), "L3_1", "tau^-1 tau'(v) is outside B_v");
  Permutation tp = compose(power(zeta, -static_cast<long long>(*c0)), tau_prime);
  g = compose(inverse(tau), tp);

  auto c = block_exponents(s, b1, z, g);
  require(c.has_value(), "L3_1", "tau^-1 tau' is not a power of zeta on some block");
  Permutation psi = Permutation::identity(s.size());
  bool all_zero = std::all_of(c->begin(), c->end(), [](unsigned x) { return x == 0; });
  if (!all_zero) {
    EquivClasses e = equiv_classes(st.group(), b1);
    const std::size_t m = e.classes.size();
    std::vector<long long> class_c(m, -1);
    for (Point x = 0; x < s.size(); ++x) {
      long long cx = (*c)[b1.block_of(x)];
      auto& slot = class_c[e.class_of[x]];
      require(slot < 0 || slot == cx, "L3_1", "c_B differs inside an equivalence class");
      slot = cx;
    }
    // Each tau-orbit of blocks must carry exponents summing to 0 (tau' has order p).
    const std::size_t nb = b1.block_count();
    std::vector<bool> walked(nb, false);
    for (std::size_t blk = 0; blk < nb; ++blk) {
      if (walked[blk]) continue;
      long long sum = 0;
      std::size_t cur = blk;
      for (unsigned t = 0; t < p; ++t) {
        walked[cur] = true;
        sum += (*c)[cur];
        cur = b1.block_of(tau(b1.block(cur).front()));
      }
      require(cur == blk && sum % p == 0, "L3_1", "exponents around a tau-orbit do not sum to 0");
      ++st.log().consistency_sum;
    }
    // Solve e(tau B) - e(B) = c_B with e constant on classes, by union-find
    // carrying offsets mod p; psi then acts on block B as zeta^e(B).
    std::vector<std::size_t> parent(nb);
    std::vector<long long> offset(nb, 0);  // e(B) - e(parent(B))
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      long long acc = 0;
      std::size_t r = x;
      while (parent[r] != r) {
        acc += offset[r];
        r = parent[r];
      }
      return std::pair{r, acc % p};
    };
    auto relate = [&](std::size_t x, std::size_t y, long long w) {  // e(y) - e(x) = w
      auto [rx, ex] = find(x);
      auto [ry, ey] = find(y);
      if (rx == ry) return ((ey - ex - w) % p + p) % p == 0;
      parent[ry] = rx;
      offset[ry] = ((ex + w - ey) % p + p) % p;
      return true;
    };
    bool solvable = true;
    for (std::size_t blk = 0; blk < nb; ++blk)
      solvable = relate(blk, b1.block_of(tau(b1.block(blk).front())), (*c)[blk]) && solvable;
    // e must be constant on each piece where zeta alone stays in G^(2), and
    // alpha-invariant so that psi commutes with every alpha.
    for (const auto& piece : zeta_pieces(st.orbitals(), b1, zeta))
      for (std::size_t blk : piece) solvable = relate(piece.front(), blk, 0) && solvable;
    for (const auto& a : alphas)
      for (std::size_t blk = 0; blk < nb; ++blk)
        solvable = relate(blk, b1.block_of(a(b1.block(blk).front())), 0) && solvable;
    require(solvable, "L3_1", "no block exponents satisfy e(tau B) = e(B) + c_B on valid pieces");
    std::vector<Point> img(s.size());
    for (Point x = 0; x < s.size(); ++x)
      img[x] = s.add(x, s.scale(z, static_cast<unsigned>(find(b1.block_of(x)).second)));
    psi = Permutation(std::move(img));
    for (const auto& cls : e.classes) {
      class_local_element(st.orbitals(), cls, zeta);
      ++st.log().class_local;
    }
    for (const auto& a : alphas) {
      bool fixes_classes = true;
      for (const auto& cls : e.classes)
        fixes_classes = fixes_classes && e.class_of[a(cls.front())] == e.class_of[cls.front()];
      if (!fixes_classes) continue;
      require(commute(psi, a), "L3_1", "psi does not commute with alpha");
      ++st.log().alpha_commutation;
    }
  }
  st.require_in_closure(psi, "L3_1");
  require(conjugate(tp, psi) == tau, "L3_1", "psi^-1 tau' psi differs from tau");
  ++st.log().psi_conjugation;
  return psi;
}

namespace {

ConjugationStep record(PipelineState& st, StepTag tag, const Permutation& psi) {
  ConjugationStep step{tag, psi, st.fingerprint(), true};
  st.apply(psi);
  return step;
}

void require_taus_in_q(PipelineState& st, unsigned upto, const char* tag) {
  for (unsigned i = 0; i <= upto; ++i)
    require(st.q_contains(st.taus().taus[i]), tag,
            "tau_" + std::to_string(i) + " is not in Q after the step");
}

// Orbits of G_v meet every B_2 block in a point, a line, or the whole block.
void check_orbit_shape(PipelineState& st) {
  const FpSpace& s = st.space();
  const std::size_t block = s.power(std::min(2u, s.n()));
  for (const auto& orb : st.vertex_stabilizer().orbits()) {
    std::map<std::size_t, std::vector<Point>> meet;
    for (Point x : orb) meet[x / block].push_back(x);
    for (const auto& [b, pts] : meet) {
      bool ok = pts.size() == 1 || pts.size() == block;
      if (pts.size() == s.p()) {
        Point z = s.sub(pts[1], pts[0]);
        ok = true;
        for (Point y : pts) ok = ok && line_coefficient(s, z, s.sub(y, pts[0])).has_value();
      }
      require(ok, "C3_2", "a G_v orbit meets a B_2 block in an unexpected shape");
    }
  }
  ++st.log().orbit_shape;
}

// The p + 1 size-p systems inside B_2: orbits of tau_0 and of tau_0^i tau_1.
std::vector<Point> line_generators(const FpSpace& s) {
  std::vector<Point> z{s.unit(0)};
  for (unsigned i = 0; i < s.p(); ++i) z.push_back(s.add(s.scale(s.unit(0), i), s.unit(1)));
  return z;
}

// Quotient coordinates (c_2, c_3) of a point, for n = 4.
std::pair<unsigned, unsigned> quotient(const FpSpace& s, Point w) {
  return {s.coord(w, 2), s.coord(w, 3)};
}

}  // namespace

ConjugationStep centralize_tau01(PipelineState& st) {
  const FpSpace& s = st.space();
  if (s.n() < 2) throw std::invalid_argument("needs rank at least 2");
  const TauFamily t = st.taus();
  Permutation psi = fixing_blocks_psi(st, t.taus[1], t.tau_primes[1],
                                      standard_blocks(s.p(), s.n(), 1), s.unit(0), {t.taus[0]});
  ConjugationStep step = record(st, StepTag::C3_2, psi);
  require_taus_in_q(st, 1, "C3_2");
  for (const auto& q : st.q_generators())
    require(commute(q, t.taus[0]) && commute(q, t.taus[1]), "C3_2",
            "tau_0 or tau_1 is not central in G");
  ++st.log().centrality;
  check_orbit_shape(st);
  return step;
}

std::optional<ConjugationStep> easy_case(PipelineState& st) {
  const FpSpace& s = st.space();
  if (s.n() != 4) throw std::invalid_argument("easy case is defined for rank 4");
  const TauFamily t = st.taus();
  Permutation g2 = compose(inverse(t.taus[2]), t.tau_primes[2]);
  std::optional<Point> chosen;
  for (Point z : line_generators(s))
    if (line_blocks(s, z).is_fixed_by(g2)) {
      chosen = z;
      break;
    }
  if (!chosen) {
    BlockSystem b2 = standard_blocks(s.p(), s.n(), 2);
    PermutationGroup gv2 = kernel_on_blocks(st.vertex_stabilizer(), b2);
    const unsigned p = s.p();
    for (Point z : line_generators(s)) {
      BlockSystem sys = line_blocks(s, z);
      // B_2 blocks (by quotient point) whose z-lines G_{v,B_2} fixes.
      std::vector<std::pair<unsigned, unsigned>> good;
      for (std::size_t b = 0; b < b2.block_count(); ++b) {
        bool fixed = true;
        for (const auto& h : gv2.generators())
          for (Point x : b2.block(b)) fixed = fixed && sys.same_block(h(x), x);
        if (fixed) good.push_back(quotient(s, b2.block(b).front()));
      }
      bool independent_pair = false;
      for (auto [a2, a3] : good)
        for (auto [b2c, b3] : good)
          independent_pair = independent_pair || (a2 * b3 + p * p - a3 * b2c) % p != 0;
      if (independent_pair) {
        require(sys.is_fixed_by(g2), "L4_1",
                "G_{v,B_2} fixes lines in two independent blocks but tau_2^-1 tau_2' moves a line");
        chosen = z;
        break;
      }
    }
  }
  if (!chosen) return std::nullopt;
  BlockSystem sys = line_blocks(s, *chosen);
  require(sys.is_invariant_under(st.group()), "L4_1", "size-p system is not G-invariant");
  Permutation psi =
      fixing_blocks_psi(st, t.taus[2], t.tau_primes[2], sys, *chosen, {t.taus[0], t.taus[1]});
  ConjugationStep step = record(st, StepTag::L4_1, psi);
  require_taus_in_q(st, 2, "L4_1");
  ++st.log().routes["easy"];
  return step;
}

Equiv2Classes sim_and_equiv2(PipelineState& st) {
  const FpSpace& s = st.space();
  if (s.n() != 4) throw std::invalid_argument("the relation is defined for rank 4");
  const std::size_t n = s.size(), block = s.power(2);
  std::vector<std::size_t> orbit_id(n);
  {
    auto orbs = st.vertex_stabilizer().orbits();
    for (std::size_t k = 0; k < orbs.size(); ++k)
      for (Point x : orbs[k]) orbit_id[x] = k;
  }
  // v ~ w iff C_w is not inside the G_v-orbit of w; translating by x gives
  // x ~ y iff v ~ y - x.
  std::vector<bool> sim(n, false);
  for (Point w = 0; w < n; ++w) {
    Point base = static_cast<Point>(w / block * block);
    for (Point u = base; u < base + block; ++u) sim[w] = sim[w] || orbit_id[u] != orbit_id[w];
  }
  for (Point w = 0; w < n; ++w)
    require(sim[w] == sim[s.neg(w)], "L5_1", "the relation ~ is not symmetric");
  st.log().sim_symmetry += n;

  Equiv2Classes out;
  for (Point w = 0; w < n; ++w)
    if (sim[w]) out.sim_differences.push_back(w);
  std::vector<Point> span = s.span(out.sim_differences);
  std::vector<bool> in_span(n, false);
  for (Point x : span) in_span[x] = true;
  out.class_of.assign(n, SIZE_MAX);
  for (Point x = 0; x < n; ++x) {
    if (out.class_of[x] != SIZE_MAX) continue;
    std::vector<Point> cls;
    for (Point y : span) cls.push_back(s.add(x, y));
    std::sort(cls.begin(), cls.end());
    for (Point y : cls) out.class_of[y] = out.classes.size();
    out.classes.push_back(std::move(cls));
  }
  const std::size_t count = out.classes.size();
  require(count == 1 || count == s.p() || count == s.p() * s.p(), "L5_1",
          "number of classes is not 1, p or p^2");
  ++st.log().equiv2_class_counts[count];

  Point e2 = s.unit(2);
  for (Point u = e2; u < e2 + block; ++u)
    require(orbit_id[u] == orbit_id[e2], "L5_2", "tau_2(C_v) is split by G_v");
  ++st.log().tau2_orbit;
  return out;
}

ConjugationStep wreathing_phi(PipelineState& st, const Equiv2Classes& e2) {
  const FpSpace& s = st.space();
  const unsigned p = s.p();
  const std::size_t count = e2.classes.size();
  require(count == p || count == p * p, "L5_3", "wreathing needs p or p^2 classes");
  const TauFamily t = st.taus();
  const auto& own = e2.classes[e2.class_of[0]];
  require(!std::binary_search(own.begin(), own.end(), s.unit(2)), "L5_3",
          "tau_2(v) is equivalent to v");
  // tau_3 spans the class of v over <tau_0, tau_1>; lowest such point.
  Point tau3 = s.unit(3);
  if (count == p) {
    auto it = std::find_if(own.begin(), own.end(), [&](Point x) { return x >= s.power(2); });
    require(it != own.end(), "L5_3", "class of v is inside C_v");
    tau3 = *it;
  }
  auto [t2, t3] = quotient(s, tau3);
  require(t3 != 0, "L5_3", "tau_3 is a multiple of tau_2 modulo C_v");
  unsigned t3_inv = 1;
  while (t3 * t3_inv % p != 1) ++t3_inv;

  std::vector<Permutation> step_pow;  // tau_2'^j tau_2^-j
  for (unsigned j = 0; j < p; ++j)
    step_pow.push_back(compose(power(t.tau_primes[2], j), power(t.taus[2], -static_cast<long long>(j))));
  std::vector<Point> img(s.size());
  for (Point w = 0; w < s.size(); ++w) {
    auto [w2, w3] = quotient(s, w);
    unsigned i = w3 * t3_inv % p;
    unsigned j = (w2 + p * p - i * t2 % p) % p;
    img[w] = step_pow[j](w);
  }
  Permutation phi(std::move(img));
  st.require_in_closure(phi, "L5_3");
  require(conjugate(t.tau_primes[2], phi) == t.taus[2], "L5_3", "phi^-1 tau_2' phi differs from tau_2");
  ++st.log().psi_conjugation;
  require(commute(phi, t.taus[0]) && commute(phi, t.taus[1]), "L5_3",
          "phi does not commute with tau_0 and tau_1");
  st.log().alpha_commutation += 2;
  ConjugationStep step = record(st, StepTag::L5_3, phi);
  require_taus_in_q(st, 2, "L5_3");
  ++st.log().routes["wreathing"];
  return step;
}

ConjugationStep lack_of_wreathing_phi(PipelineState& st, const Equiv2Classes& e2) {
  const FpSpace& s = st.space();
  const unsigned p = s.p();
  const long long pp = p;
  require(e2.classes.size() == 1, "L5_4_CASE2", "needs a single class");
  const TauFamily t = st.taus();
  std::vector<bool> sim(s.size(), false);
  for (Point w : e2.sim_differences) sim[w] = true;

  auto alpha_it = std::find_if(e2.sim_differences.begin(), e2.sim_differences.end(),
                               [&](Point w) { return w >= s.power(2); });
  require(alpha_it != e2.sim_differences.end(), "L5_4_CASE2", "no alpha with v ~ alpha(v)");
  const Point alpha = *alpha_it;
  auto [a2, a3] = quotient(s, alpha);
  require(a3 != 0, "L5_4_CASE2", "v ~ w for some w in tau_2^j(C_v)");
  // Blocks tau_2^j alpha(C_v) related to v; j = 0 is alpha itself.
  std::vector<unsigned> js;
  for (unsigned j = 1; j < p; ++j)
    if (sim[s.add(alpha, s.scale(s.unit(2), j))]) js.push_back(j);
  require(!js.empty(), "L5_4_CASE2", "no beta with v ~ beta(v) independent of alpha");
  require(js.size() == 1, "L5_4_CASE1", "a third direction is related to v");
  const unsigned i = js.front();

  const Permutation g = compose(inverse(t.taus[2]), t.tau_primes[2]);
  // sigma[a][b] = g(w) - w for w = a alpha + b e_2; lies in <e_0, e_1>.
  std::vector<std::vector<Point>> sigma(p, std::vector<Point>(p));
  for (unsigned a = 0; a < p; ++a)
    for (unsigned b = 0; b < p; ++b) {
      Point w = s.add(s.scale(alpha, a), s.scale(s.unit(2), b));
      sigma[a][b] = s.sub(g(w), w);
      require(sigma[a][b] < s.power(2), "L5_4_CASE2", "tau_2^-1 tau_2' moves a B_2 block");
    }
  const Point s10 = sigma[1][0], s1i = sigma[1][i];
  const long long x0 = s.coord(s10, 0), y0 = s.coord(s10, 1);
  const long long x1 = s.coord(s1i, 0), y1 = s.coord(s1i, 1);
  long long det = ((x0 * y1 - x1 * y0) % pp + pp) % pp;
  require(det != 0, "L5_4_CASE2", "sigma_{1,0} and sigma_{1,i} are dependent");
  long long det_inv = 1;
  while (det * det_inv % pp != 1) ++det_inv;
  // k_m s10 - k'_m s1i = -(sigma_{m,0} + ... + sigma_{m,mi-1}).
  std::vector<long long> k(p, 0);
  for (unsigned m = 0; m < p; ++m) {
    Point rhs = 0;
    for (unsigned b = 0; b < m * i; ++b) rhs = s.add(rhs, sigma[m][b % p]);
    rhs = s.neg(rhs);
    long long rx = s.coord(rhs, 0), ry = s.coord(rhs, 1);
    k[m] = ((rx * y1 - x1 * ry) % pp + pp) % pp * det_inv % pp;
  }
  require(k[0] == 0, "L5_4_CASE2", "k_0 is not 0");

  unsigned a3_inv = 1;
  while (a3 * a3_inv % p != 1) ++a3_inv;
  std::vector<Permutation> tp_pow, t_inv_pow;
  for (unsigned e = 0; e < p; ++e) {
    tp_pow.push_back(power(t.tau_primes[2], e));
    t_inv_pow.push_back(power(t.taus[2], -static_cast<long long>(e)));
  }
  std::vector<Point> img(s.size());
  for (Point w = 0; w < s.size(); ++w) {
    auto [w2, w3] = quotient(s, w);
    unsigned a = w3 * a3_inv % p;
    unsigned tt = (w2 + p * p - a * a2 % p) % p;
    Point u = t_inv_pow[tt](w);
    img[w] = tp_pow[tt](s.add(u, s.scale(s10, k[a])));
  }
  Permutation phi(std::move(img));
  st.require_in_closure(phi, "L5_4_CASE2");
  require(conjugate(t.tau_primes[2], phi) == t.taus[2], "L5_4_CASE2",
          "phi^-1 tau_2' phi differs from tau_2");
  ++st.log().psi_conjugation;
  require(commute(phi, t.taus[0]) && commute(phi, t.taus[1]), "L5_4_CASE2",
          "phi does not commute with tau_0 and tau_1");
  st.log().alpha_commutation += 2;
  ConjugationStep step = record(st, StepTag::L5_4_CASE2, phi);
  require_taus_in_q(st, 2, "L5_4_CASE2");
  ++st.log().routes["lack_of_wreathing"];
  return step;
}

ConjugationStep final_step(PipelineState& st, std::uint64_t node_budget) {
  const FpSpace& s = st.space();
  const unsigned rank = s.n();
  const std::size_t n = s.size();
  for (unsigned i = 0; i + 2 <= rank; ++i)
    require(st.q_contains(st.taus().taus[i]), "FINAL",
            "tau_" + std::to_string(i) + " is not in Q before the final step");
  const RegularGroupTable& q = st.q();
  const OrbitalPartition& o = st.orbitals();
  // psi fixes v and sends x = sum c_i e_i to prod theta(tau_i)^{c_i}(v),
  // where theta(tau_i) is the element of Q sending v to images[i].
  std::vector<Point> psi(n, 0);
  std::vector<bool> used(n, false);
  used[0] = true;
  std::uint64_t nodes = 0;

  auto extend = [&](auto&& self, unsigned k) -> bool {
    if (k == rank) return true;
    const std::size_t dom = s.power(k), next = s.power(k + 1);
    std::vector<Point> order{s.unit(k)};
    for (Point w = 1; w < n; ++w)
      if (w != s.unit(k)) order.push_back(w);
    for (Point w : order) {
      if (used[w]) continue;
      if (++nodes > node_budget)
        throw ContractViolation("FINAL", "search budget exhausted");
      const Permutation& qk = q.sending(w);
      std::vector<Point> marked;
      bool ok = true;
      for (std::size_t y = dom; y < next && ok; ++y) {
        psi[y] = qk(psi[y - dom]);
        if (used[psi[y]]) {
          ok = false;
          break;
        }
        used[psi[y]] = true;
        marked.push_back(psi[y]);
        const auto py = static_cast<Point>(y);
        for (std::size_t z = 0; z <= y && ok; ++z) {
          const auto pz = static_cast<Point>(z);
          ok = o.color_of(psi[y], psi[z]) == o.color_of(py, pz) &&
               o.color_of(psi[z], psi[y]) == o.color_of(pz, py);
        }
      }
      if (ok && self(self, k + 1)) return true;
      for (Point m : marked) used[m] = false;
    }
    return false;
  };
  bool found = extend(extend, 0);
  st.log().final_nodes += nodes;
  require(found, "FINAL", "no conjugator in the 2-closure fixes v");
  Permutation p(psi);
  st.require_in_closure(p, "FINAL");
  for (const auto& g : st.q_generators())
    require(s.as_translation(conjugate(g, p)).has_value(), "FINAL",
            "psi does not conjugate Q onto R");
  ++st.log().psi_conjugation;
  ConjugationStep step = record(st, StepTag::FINAL, p);
  require_taus_in_q(st, rank - 1, "FINAL");
  return step;
}

namespace {

// Linear phi with phi^-1 G phi preserving the standard block chain.
Permutation standard_frame(const FpSpace& s, const std::vector<Permutation>& gens) {
  bool standard = true;
  for (unsigned level = 1; level < s.n() && standard; ++level) {
    BlockSystem b = standard_blocks(s.p(), s.n(), level);
    for (const auto& g : gens) standard = standard && b.is_invariant_under(g);
  }
  if (standard) return Permutation::identity(s.size());
  std::vector<Point> block{0}, basis;
  while (block.size() < s.size()) {
    bool grown = false;
    for (Point w = 1; w < s.size() && !grown; ++w) {
      if (std::binary_search(block.begin(), block.end(), w)) continue;
      std::vector<Point> seed = block;
      seed.push_back(w);
      std::vector<Point> next = minimal_block(s.size(), gens, seed);
      if (next.size() == block.size() * s.p()) {
        basis.push_back(w);
        block = std::move(next);
        std::sort(block.begin(), block.end());
        grown = true;
      }
    }
    require(grown, "SYLOW", "G has no chain of block systems with ratio p");
  }
  Permutation phi = s.linear_map(basis);
  for (unsigned level = 1; level < s.n(); ++level) {
    BlockSystem b = standard_blocks(s.p(), s.n(), level);
    for (const auto& g : gens)
      require(b.is_invariant_under(conjugate(g, phi)), "SYLOW", "relabeled G misses a standard system");
  }
  return phi;
}

}  // namespace

ConjugationCertificate conjugate_full(const FpSpace& space, const std::vector<Permutation>& q_gens,
                                      std::uint64_t seed, PropertyLog* log, bool verify) {
  if (space.n() > 4) throw std::invalid_argument("the conjugation pipeline supports rank <= 4");
  PropertyLog local;
  PropertyLog& lg = log ? *log : local;
  const std::size_t n = space.size();
  try {
    RegularGroupTable check(n, q_gens);
    if (!check.is_elementary_abelian(space.p()))
      throw std::invalid_argument("Q is not elementary abelian");

    ConjugationCertificate cert;
    cert.p = space.p();
    cert.n = space.n();
    cert.seed = seed;
    std::vector<Permutation> g0 = unit_translations(space);
    g0.insert(g0.end(), q_gens.begin(), q_gens.end());
    SylowEmbedding emb = sylow_embed(space, q_gens, seed);
    cert.steps.push_back({StepTag::SYLOW, emb.c, fingerprint_of(g0), true});
    ++lg.routes[emb.giant ? "sylow_giant" : emb.c.is_identity() ? "sylow_trivial" : "sylow_sampled"];

    std::vector<Permutation> g1 = unit_translations(space);
    g1.insert(g1.end(), emb.qc.begin(), emb.qc.end());
    Permutation phi = standard_frame(space, g1);
    if (!phi.is_identity()) ++lg.routes["relabeled_frame"];
    Permutation phi_inv = inverse(phi);
    std::vector<Permutation> framed;
    for (const auto& g : emb.qc) framed.push_back(conjugate(g, phi));

    PipelineState st(space, framed, lg);
    std::vector<ConjugationStep> inner;
    if (space.n() >= 2) inner.push_back(centralize_tau01(st));
    if (space.n() == 4) {
      if (auto e = easy_case(st)) {
        inner.push_back(*e);
      } else {
        Equiv2Classes e2 = sim_and_equiv2(st);
        inner.push_back(e2.classes.size() > 1 ? wreathing_phi(st, e2) : lack_of_wreathing_phi(st, e2));
      }
    }
    inner.push_back(final_step(st));
    for (auto& step : inner) {
      step.conjugator = compose(phi, compose(step.conjugator, phi_inv));
      cert.steps.push_back(std::move(step));
    }
    cert.composite = Permutation::identity(n);
    for (const auto& step : cert.steps) cert.composite = compose(cert.composite, step.conjugator);
    if (verify) {
      VerifyOutcome v = verify_certificate(cert, q_gens);
      require(v.ok, "CERT", v.failure);
      cert.verified = true;
    }
    return cert;
  } catch (ContractViolation& e) {
    e.set_seed(seed);
    throw;
  }
}

}  // namespace ciforge
