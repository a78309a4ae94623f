#include "ciforge/dci_verify.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "ciforge/ea_structure.hpp"
#include "ciforge/errors.hpp"
#include "ciforge/two_closure.hpp"

namespace ciforge {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

unsigned primitive_root(unsigned p) {
  for (unsigned g = 1; g < p; ++g) {
    unsigned x = 1, k = 0;
    do {
      x = x * g % p;
      ++k;
    } while (x != 1);
    if (k == p - 1) return g;
  }
  return 1;
}

// Elementary transvections and one scaling; together they generate GL(n, p).
std::vector<Permutation> gl_generators(const FpSpace& s) {
  std::vector<Point> id;
  for (unsigned i = 0; i < s.n(); ++i) id.push_back(s.unit(i));
  std::vector<Permutation> gens;
  for (unsigned i = 0; i < s.n(); ++i)
    for (unsigned j = 0; j < s.n(); ++j) {
      if (i == j) continue;
      auto cols = id;
      cols[j] = s.add(cols[j], s.unit(i));
      gens.push_back(s.linear_map(cols));
    }
  if (s.p() > 2) {
    auto cols = id;
    cols[0] = s.scale(cols[0], primitive_root(s.p()));
    gens.push_back(s.linear_map(cols));
  }
  return gens;
}

std::uint64_t image_mask(const Permutation& g, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (; mask; mask &= mask - 1) out |= std::uint64_t{1} << g(static_cast<Point>(std::countr_zero(mask)));
  return out;
}

std::string hex_mask(std::uint64_t mask) {
  std::ostringstream o;
  o << "0x" << std::hex << mask;
  return o.str();
}

const char* mode_name(CensusMode m) { return m == CensusMode::exhaustive ? "exhaustive" : "sample"; }

std::vector<SizeLine> size_lines(std::size_t points, const std::vector<std::size_t>& orbit_sizes,
                                 const std::vector<std::size_t>& iso_sizes) {
  std::vector<SizeLine> lines(points + 1);
  for (std::size_t k = 0; k <= points; ++k) lines[k].size = k;
  for (std::size_t k : orbit_sizes) ++lines[k].orbits;
  for (std::size_t k : iso_sizes) ++lines[k].iso;
  return lines;
}

}  // namespace

std::vector<Permutation> aut_group_of_R(unsigned p, unsigned n, std::size_t limit) {
  FpSpace s(p, n);
  GroupOrder order = 1;
  for (unsigned i = 0; i < n; ++i) order *= GroupOrder(s.size() - s.power(i));
  if (order > limit) throw BudgetExceeded("GL(" + std::to_string(n) + "," + std::to_string(p) + ") is too large to list");
  std::vector<Permutation> out;
  out.reserve(static_cast<std::size_t>(order));
  std::vector<Point> cols;
  auto extend = [&](auto&& self) -> void {
    if (cols.size() == n) {
      out.push_back(s.linear_map(cols));
      return;
    }
    std::vector<Point> span = s.span(cols);
    for (Point c = 1; c < s.size(); ++c) {
      if (std::binary_search(span.begin(), span.end(), c)) continue;
      cols.push_back(c);
      self(self);
      cols.pop_back();
    }
  };
  extend(extend);
  return out;
}

GroupOrder gl_orbit_count_burnside(unsigned p, unsigned n) {
  std::vector<Permutation> gl = aut_group_of_R(p, n);
  GroupOrder sum = 0;
  for (const auto& m : gl) {
    std::vector<bool> seen(m.degree(), false);
    unsigned cycles = 0;
    for (Point x = 0; x < m.degree(); ++x) {
      if (seen[x]) continue;
      ++cycles;
      for (Point y = x; !seen[y]; y = m(y)) seen[y] = true;
    }
    sum += GroupOrder(1) << cycles;
  }
  return sum / GroupOrder(gl.size());
}

std::string format_census_report(const CensusReport& r) {
  std::ostringstream o;
  o << "census p=" << r.p << " n=" << r.n << " mode=" << mode_name(r.mode) << " seed=" << r.seed
    << " sets=" << r.sets << '\n';
  for (const auto& l : r.per_size)
    if (l.orbits || l.iso) o << "size " << l.size << ": orbits=" << l.orbits << " iso=" << l.iso << '\n';
  o << "total: orbits=" << r.aut_orbit_count << " iso=" << r.iso_class_count << '\n';
  for (const auto& f : r.failures) o << "failure: " << f << '\n';
  o << "dci: " << (r.dci_signature() ? "yes" : "no") << '\n';
  return o.str();
}

CensusReport brute_force_dci_oracle(unsigned p, unsigned n, const CensusOptions& opt,
                                    Classification* detail) {
  FpSpace s(p, n);
  const std::size_t points = s.size();
  if (points > exhaustive_point_limit)
    throw BudgetExceeded("2^" + std::to_string(points) + " connection sets is beyond exhaustive mode; use sample mode");
  const auto t0 = Clock::now();
  const std::uint64_t total = std::uint64_t{1} << points;

  // Canonical forms, filled by workers over disjoint mask chunks.
  std::vector<std::string> forms(total);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu, record_mu;
  auto work = [&] {
    try {
      constexpr std::uint64_t chunk = 256;
      for (std::uint64_t lo; (lo = next.fetch_add(chunk)) < total;) {
        for (std::uint64_t m = lo; m < std::min(total, lo + chunk); ++m) {
          if (opt.lookup)
            if (auto f = opt.lookup(m)) {
              forms[m] = std::move(*f);
              continue;
            }
          forms[m] = canonical_form(build_cayley(s, connection_set_from_mask(p, n, m)));
          if (opt.record) {
            std::lock_guard lock(record_mu);
            opt.record(m, forms[m]);
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
      next = total;
    }
  };
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  Classification c;
  c.iso_of.assign(total, 0);
  c.orbit_of.assign(total, UINT32_MAX);
  std::unordered_map<std::string, std::uint32_t> iso_id;
  std::vector<std::size_t> iso_sizes, orbit_sizes;
  for (std::uint64_t m = 0; m < total; ++m) {
    auto [it, added] = iso_id.emplace(forms[m], static_cast<std::uint32_t>(iso_id.size()));
    if (added) iso_sizes.push_back(static_cast<std::size_t>(std::popcount(m)));
    c.iso_of[m] = it->second;
  }
  std::vector<Permutation> gens = gl_generators(s);
  std::vector<std::uint64_t> stack;
  std::uint32_t orbits = 0;
  for (std::uint64_t m = 0; m < total; ++m) {
    if (c.orbit_of[m] != UINT32_MAX) continue;
    orbit_sizes.push_back(static_cast<std::size_t>(std::popcount(m)));
    c.orbit_of[m] = orbits;
    stack.assign(1, m);
    while (!stack.empty()) {
      std::uint64_t x = stack.back();
      stack.pop_back();
      for (const auto& g : gens) {
        std::uint64_t y = image_mask(g, x);
        if (c.orbit_of[y] == UINT32_MAX) {
          c.orbit_of[y] = orbits;
          stack.push_back(y);
        }
      }
    }
    ++orbits;
  }

  CensusReport r;
  r.p = p;
  r.n = n;
  r.mode = CensusMode::exhaustive;
  r.sets = total;
  r.iso_class_count = iso_id.size();
  r.aut_orbit_count = orbits;
  r.per_size = size_lines(points, orbit_sizes, iso_sizes);
  // An isomorphism class spanning two orbits is a DCI counterexample.
  std::vector<std::uint64_t> first_in_class(iso_id.size(), UINT64_MAX);
  std::vector<std::uint32_t> orbit_of_class(iso_id.size(), 0);
  std::vector<bool> reported(orbits, false);
  for (std::uint64_t m = 0; m < total; ++m) {
    std::uint32_t k = c.iso_of[m];
    if (first_in_class[k] == UINT64_MAX) {
      first_in_class[k] = m;
      orbit_of_class[k] = c.orbit_of[m];
    } else if (c.orbit_of[m] != orbit_of_class[k] && !reported[c.orbit_of[m]]) {
      reported[c.orbit_of[m]] = true;
      r.failures.push_back("S=" + hex_mask(first_in_class[k]) + " and T=" + hex_mask(m) +
                           " give isomorphic digraphs but lie in different Aut(R)-orbits");
    }
  }
  r.elapsed_secs = seconds_since(t0);
  if (detail) *detail = std::move(c);
  return r;
}

std::optional<Permutation> linear_witness(const FpSpace& space, const ConnectionSet& s,
                                          const ConnectionSet& t, PropertyLog* log) {
  CayleyDigraph ds = build_cayley(space, s), dt = build_cayley(space, t);
  std::optional<Permutation> g = are_isomorphic(ds.graph, dt.graph);
  if (!g) return std::nullopt;
  // g^-1 R g lies in Aut(D_S); bringing it back onto R inside the 2-closure
  // makes g c normalize R, and a translation then leaves a linear map.
  ConjugationCertificate cert = conjugate_full(space, conjugated_translations(space, *g), 0, log);
  Permutation h = compose(*g, cert.composite);
  Permutation m = compose(space.translation(space.neg(h(0))), h);
  std::vector<Point> cols;
  for (unsigned i = 0; i < space.n(); ++i) cols.push_back(m(space.unit(i)));
  if (m != space.linear_map(cols))
    throw ContractViolation("WITNESS", "isomorphism normalizing R is not affine");
  std::vector<Point> image;
  for (Point x : s.members) image.push_back(m(x));
  std::sort(image.begin(), image.end());
  if (image != t.members) throw ContractViolation("WITNESS", "linear map does not carry S to T");
  return m;
}

CensusReport sampled_census(unsigned p, unsigned n, std::uint64_t samples, std::uint64_t seed,
                            PropertyLog* log) {
  FpSpace s(p, n);
  const std::size_t points = s.size();
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  struct IsoClass {
    std::vector<ConnectionSet> orbit_reps;
  };
  std::map<std::string, IsoClass> classes;
  std::vector<std::size_t> iso_sizes, orbit_sizes;
  CensusReport r;
  r.p = p;
  r.n = n;
  r.mode = CensusMode::sampled;
  r.seed = seed;
  r.sets = samples;
  std::vector<Point> all(points);
  std::iota(all.begin(), all.end(), 0);
  auto describe = [](const ConnectionSet& c) {
    std::string out = "{";
    for (std::size_t i = 0; i < c.members.size(); ++i) out += (i ? " " : "") + std::to_string(c.members[i]);
    return out + "}";
  };
  for (std::uint64_t i = 0; i < samples; ++i) {
    // Stratified: sample i has size i mod (points + 1).
    const std::size_t k = i % (points + 1);
    std::shuffle(all.begin(), all.end(), rng);
    ConnectionSet set{p, n, {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k)}};
    std::sort(set.members.begin(), set.members.end());
    std::vector<Point> cols;
    while (cols.size() < n) {
      Point c = static_cast<Point>(rng() % points);
      std::vector<Point> span = s.span(cols);
      if (!std::binary_search(span.begin(), span.end(), c)) cols.push_back(c);
    }
    Permutation phi = s.linear_map(cols);
    ConnectionSet partner{p, n, {}};
    for (Point x : set.members) partner.members.push_back(phi(x));
    std::sort(partner.members.begin(), partner.members.end());
    try {
      if (!linear_witness(s, set, partner, log))
        r.failures.push_back("sample " + std::to_string(i) + ": " + describe(set) +
                             " is not isomorphic to its linear image");
      std::string form = canonical_form(build_cayley(s, set));
      auto [it, added] = classes.try_emplace(form);
      if (added) iso_sizes.push_back(k);
      bool known = false;
      for (const auto& rep : it->second.orbit_reps)
        if (linear_witness(s, rep, set, log)) {
          known = true;
          break;
        }
      if (!known) {
        if (!it->second.orbit_reps.empty())
          r.failures.push_back("sample " + std::to_string(i) + ": " + describe(set) + " and " +
                               describe(it->second.orbit_reps.front()) +
                               " are isomorphic with no linear witness");
        it->second.orbit_reps.push_back(set);
        orbit_sizes.push_back(k);
      }
    } catch (const ContractViolation& e) {
      r.failures.push_back("sample " + std::to_string(i) + ": " + e.what());
    }
  }
  r.iso_class_count = classes.size();
  r.aut_orbit_count = orbit_sizes.size();
  r.per_size = size_lines(points, orbit_sizes, iso_sizes);
  r.elapsed_secs = seconds_since(t0);
  return r;
}

namespace {

const std::vector<Permutation>& cached_gl(unsigned p, unsigned n) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, unsigned>, std::vector<Permutation>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({p, n});
  if (it == cache.end()) it = cache.emplace(std::pair{p, n}, aut_group_of_R(p, n)).first;
  return it->second;
}

bool fixed_point_free(const Permutation& g) { return g.fixed_point_count() == 0; }

}  // namespace

BabaiResult babai_check(const CayleyDigraph& d, std::uint64_t node_budget) {
  FpSpace s(d.p, d.n);
  const std::size_t points = s.size();
  PermutationGroup a = automorphism_group(d);
  BabaiResult out;
  out.aut_order = a.order();
  std::vector<Permutation> elements;
  try {
    elements = a.elements(node_budget);
  } catch (const std::length_error&) {
    return out;  // inconclusive
  }
  // Candidates: fixed-point-free elements of order p, bucketed by image of 0.
  std::vector<std::vector<Permutation>> by_image(points);
  for (auto& g : elements)
    if (fixed_point_free(g) && power(g, d.p).is_identity()) by_image[g(0)].push_back(std::move(g));
  elements.clear();

  // Grow semiregular elementary abelian H; the next generator is the unique
  // element of the target subgroup sending 0 to the least point outside H(0),
  // so each subgroup is reached exactly once.
  std::vector<Permutation> h{Permutation::identity(points)}, gens;
  std::vector<bool> covered(points, false);
  covered[0] = true;
  std::uint64_t nodes = 0;
  bool exhausted = false;
  auto grow = [&](auto&& self) -> void {
    if (h.size() == points) {
      out.subgroups.push_back(gens);
      return;
    }
    Point w = 0;
    while (covered[w]) ++w;
    for (const auto& g : by_image[w]) {
      if (++nodes > node_budget) {
        exhausted = true;
        return;
      }
      if (!std::all_of(gens.begin(), gens.end(), [&](const Permutation& x) { return commute(x, g); }))
        continue;
      std::vector<Permutation> added;
      bool ok = true;
      Permutation gk = g;
      for (unsigned k = 1; k < d.p && ok; ++k, gk = compose(gk, g))
        for (const auto& x : h) {
          Permutation y = compose(x, gk);
          if (!fixed_point_free(y)) {
            ok = false;
            break;
          }
          added.push_back(std::move(y));
        }
      if (!ok) continue;
      const std::size_t old = h.size();
      h.insert(h.end(), added.begin(), added.end());
      gens.push_back(g);
      for (std::size_t i = old; i < h.size(); ++i) covered[h[i](0)] = true;
      self(self);
      for (std::size_t i = old; i < h.size(); ++i) covered[h[i](0)] = false;
      gens.pop_back();
      h.resize(old);
      if (exhausted) return;
    }
  };
  grow(grow);
  if (exhausted) {
    out.subgroups.clear();
    return out;
  }

  // T = y^-1 R y, so x = y^-1 M (M in GL) ranges over all conjugators of T onto R.
  const std::vector<Permutation>& gl = cached_gl(d.p, d.n);
  out.outcome = BabaiOutcome::yes;
  for (const auto& t : out.subgroups) {
    Permutation y_inv = inverse(regular_conjugator(s, RegularGroupTable(points, t)));
    std::optional<Permutation> found;
    for (const auto& m : gl) {
      Permutation x = compose(y_inv, m);
      if (a.contains(x)) {
        found = x;
        break;
      }
    }
    if (!found) {
      out.outcome = BabaiOutcome::no;
      out.conjugators.clear();
      return out;
    }
    for (const auto& g : t)
      if (!s.as_translation(conjugate(g, *found)))
        throw ContractViolation("BABAI", "conjugator does not carry T onto R");
    out.conjugators.push_back(*found);
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
  std::mt19937_64 rng(seq);
  return rng();
}

Permutation trial_pi(std::size_t degree, std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed);
  std::vector<Point> v(degree);
  std::iota(v.begin(), v.end(), 0);
  std::shuffle(v.begin(), v.end(), rng);
  return Permutation(std::move(v));
}

CampaignReport random_pi_campaign(unsigned p, unsigned n, std::uint64_t trials, std::uint64_t seed,
                                  double timeout_secs) {
  FpSpace s(p, n);
  CampaignReport r;
  r.p = p;
  r.n = n;
  r.seed = seed;
  r.trials = trials;
  const auto start = Clock::now();
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t ts = trial_seed(seed, t);
    const auto t0 = Clock::now();
    // The trial runs on its own thread so the campaign can move on after a
    // timeout; an abandoned trial keeps only its shared state alive.
    struct Shared {
      std::mutex mu;
      std::condition_variable cv;
      bool done = false;
      bool verified = false;
      std::optional<TrialFailure> failure;
      PropertyLog log;
    };
    auto sh = std::make_shared<Shared>();
    std::thread worker([sh, s, ts] {
      PropertyLog log;
      bool verified = false;
      std::optional<TrialFailure> failure;
      try {
        verified = conjugate_full(s, conjugated_translations(s, trial_pi(s.size(), ts)), ts, &log).verified;
      } catch (const ContractViolation& e) {
        failure = TrialFailure{ts, e.tag(), e.what()};
      } catch (const std::exception& e) {
        failure = TrialFailure{ts, "ERROR", e.what()};
      }
      std::lock_guard lock(sh->mu);
      sh->verified = verified;
      sh->failure = std::move(failure);
      sh->log = std::move(log);
      sh->done = true;
      sh->cv.notify_all();
    });
    std::unique_lock lock(sh->mu);
    bool finished = true;
    if (timeout_secs > 0)
      finished = sh->cv.wait_for(lock, std::chrono::duration<double>(timeout_secs), [&] { return sh->done; });
    else
      sh->cv.wait(lock, [&] { return sh->done; });
    lock.unlock();
    if (finished) {
      worker.join();
      if (sh->failure) r.failures.push_back(*sh->failure);
      if (sh->verified) ++r.verified;
      r.log.merge(sh->log);
    } else {
      worker.detach();
      ++r.timeouts;
      r.timeout_seeds.push_back(ts);
    }
    r.max_secs = std::max(r.max_secs, seconds_since(t0));
  }
  r.total_secs = seconds_since(start);
  return r;
}

std::string format_campaign_report(const CampaignReport& r) {
  std::ostringstream o;
  o << "campaign p=" << r.p << " n=" << r.n << " seed=" << r.seed << " trials=" << r.trials << '\n';
  o << "verified: " << r.verified << '\n';
  o << "failures: " << r.failures.size() << '\n';
  for (const auto& f : r.failures) o << "failure seed=" << f.seed << " tag=" << f.tag << ": " << f.what << '\n';
  o << "timeouts: " << r.timeouts << '\n';
  for (auto ts : r.timeout_seeds) o << "timeout seed=" << ts << '\n';
  const PropertyLog& l = r.log;
  o << "checks: block_agreement=" << l.block_agreement << " class_local=" << l.class_local
    << " psi_membership=" << l.psi_membership << " psi_conjugation=" << l.psi_conjugation
    << " alpha_commutation=" << l.alpha_commutation << " consistency_sum=" << l.consistency_sum
    << " orbit_shape=" << l.orbit_shape << " sim_symmetry=" << l.sim_symmetry
    << " tau2_orbit=" << l.tau2_orbit << " centrality=" << l.centrality << '\n';
  for (const auto& [k, v] : l.equiv2_class_counts) o << "equiv2 classes " << k << ": " << v << '\n';
  for (const auto& [k, v] : l.routes) o << "route " << k << ": " << v << '\n';
  return o.str();
}

}  // namespace ciforge
