#include "ciforge/harness.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "ciforge/block_system.hpp"
#include "ciforge/certificate.hpp"
#include "ciforge/ea_structure.hpp"
#include "ciforge/errors.hpp"
#include "ciforge/text_io.hpp"
#include "ciforge/two_closure.hpp"

namespace ciforge {

namespace {

void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::trunc);
  if (!f) throw std::invalid_argument("cannot write " + c.out_path);
  f << text;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

std::vector<Permutation> read_generators(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<Permutation> gens = read_permutations(in);
  if (gens.empty()) throw ParseError(path + " holds no permutations");
  for (const auto& g : gens)
    if (g.degree() != gens.front().degree()) throw ParseError(path + " mixes degrees");
  return gens;
}

Permutation read_single_permutation(const std::string& path, std::size_t degree) {
  std::vector<Permutation> gens = read_generators(path);
  if (gens.front().degree() != degree)
    throw ParseError(path + ": expected a permutation of " + std::to_string(degree) + " points");
  return gens.front();
}

std::string cache_header(const RunConfig& c) {
  return "# census-cache p=" + std::to_string(c.p) + " n=" + std::to_string(c.n) +
         " mode=exhaustive seed=" + std::to_string(c.seed);
}

// Append-only `<canonical-form-hex> <mask>` records behind a key header.
std::unordered_map<std::uint64_t, std::string> load_cache(const RunConfig& c) {
  std::unordered_map<std::uint64_t, std::string> known;
  std::ifstream in(c.cache_path);
  if (!in) return known;
  std::string line;
  if (!std::getline(in, line)) return known;
  if (line != cache_header(c))
    throw std::invalid_argument("cache " + c.cache_path + " belongs to a different run (" + line + ")");
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string form;
    std::uint64_t mask = 0;
    // A torn last record from an interrupted run is simply recomputed.
    if (fields >> form >> mask) known.emplace(mask, std::move(form));
  }
  return known;
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.n < 1) throw std::invalid_argument("--n must be at least 1");
  FpSpace(c.p, c.n);  // rejects non-prime p and spaces above the point cap
  if (c.timeout_secs < 0) throw std::invalid_argument("--timeout-secs must be non-negative");
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_usage;
  } catch (const ContractViolation& e) {
    err << e.what() << " (seed " << e.seed() << ")\n";
    return exit_contract;
  } catch (const BudgetExceeded& e) {
    err << "too large: " << e.what() << '\n';
    return exit_too_large;
  } catch (const std::invalid_argument& e) {
    err << "usage: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_check_failed;
  }
}

int cmd_census(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  CensusReport r;
  if (c.mode == CensusMode::exhaustive) {
    CensusOptions opt;
    std::unordered_map<std::uint64_t, std::string> known;
    std::ofstream cache;
    if (!c.cache_path.empty()) {
      known = load_cache(c);
      const bool fresh = !std::filesystem::exists(c.cache_path) || std::filesystem::file_size(c.cache_path) == 0;
      cache.open(c.cache_path, std::ios::app);
      if (!cache) throw std::invalid_argument("cannot write " + c.cache_path);
      if (fresh) cache << cache_header(c) << '\n';
      opt.lookup = [&](std::uint64_t m) -> std::optional<std::string> {
        auto it = known.find(m);
        if (it == known.end()) return std::nullopt;
        return it->second;
      };
      opt.record = [&](std::uint64_t m, const std::string& form) { cache << form << ' ' << m << '\n'; };
    }
    r = brute_force_dci_oracle(c.p, c.n, opt);
    r.seed = c.seed;
    if (c.verify) {
      GroupOrder burnside = gl_orbit_count_burnside(c.p, c.n);
      if (burnside != r.aut_orbit_count)
        r.failures.push_back("Burnside count " + burnside.str() + " differs from orbit enumeration " +
                             std::to_string(r.aut_orbit_count));
    }
  } else {
    r = sampled_census(c.p, c.n, c.trials, c.seed);
  }
  std::string text = format_census_report(r);
  if (!c.verify) text = "# verification disabled\n" + text;
  emit(c, out, text);
  err << "census p=" << c.p << " n=" << c.n << " elapsed " << r.elapsed_secs << " s\n";
  return r.dci_signature() ? exit_ok : exit_check_failed;
}

int cmd_campaign(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  CampaignReport r = random_pi_campaign(c.p, c.n, c.trials, c.seed, c.timeout_secs);
  emit(c, out, format_campaign_report(r));
  err << "campaign elapsed " << r.total_secs << " s, slowest trial " << r.max_secs << " s\n";
  if (!r.failures.empty()) return exit_contract;
  return r.verified == r.trials ? exit_ok : exit_check_failed;
}

int cmd_conj(const RunConfig& c, const std::string& pi_file, std::ostream& out, std::ostream& err) {
  validate(c);
  FpSpace s(c.p, c.n);
  Permutation pi = pi_file.empty() ? trial_pi(s.size(), c.seed) : read_single_permutation(pi_file, s.size());
  std::vector<Permutation> q = conjugated_translations(s, pi);
  try {
    ConjugationCertificate cert = conjugate_full(s, q, c.seed, nullptr, c.verify);
    std::string text = format_certificate(cert);
    if (!c.verify) text = "# verification disabled\n" + text;
    emit(c, out, text);
    return exit_ok;
  } catch (const ContractViolation&) {
    err << "pi " << format_permutation(pi) << '\n';
    for (const auto& g : q) err << "q " << format_permutation(g) << '\n';
    throw;
  }
}

int cmd_verify_certificate(const std::string& cert_file, const std::string& pi_file,
                           std::ostream& out, std::ostream& err) {
  std::ifstream in = open_input(cert_file);
  ConjugationCertificate cert = parse_certificate(in);
  FpSpace s(cert.p, cert.n);
  Permutation pi = read_single_permutation(pi_file, s.size());
  VerifyOutcome v = verify_certificate(cert, conjugated_translations(s, pi));
  if (!v.ok) {
    err << "certificate rejected: " << v.failure << '\n';
    return exit_check_failed;
  }
  out << "certificate verified: " << cert.steps.size() << " steps\n";
  return exit_ok;
}

int cmd_group_tools(const std::string& sub, const std::string& input, std::ostream& out,
                    std::ostream& err) {
  (void)err;
  auto print_group = [&](const PermutationGroup& g) {
    for (const auto& x : g.generators()) out << format_permutation(x) << '\n';
    out << "order: " << g.order() << '\n';
  };
  if (sub == "aut") {
    std::ifstream in = open_input(input);
    std::string line;
    while (std::getline(in, line) && (line.empty() || line.front() == '#')) {
    }
    if (line.empty()) throw ParseError(input + " holds no connection set");
    ConnectionSetRecord rec = parse_connection_set(line);
    print_group(automorphism_group(build_cayley(rec.p, rec.n, ConnectionSet{rec.p, rec.n, rec.members})));
    return exit_ok;
  }
  std::vector<Permutation> gens = read_generators(input);
  PermutationGroup g(gens.front().degree(), gens);
  if (sub == "two-closure") {
    print_group(two_closure(g));
  } else if (sub == "orbitals") {
    out << format_orbitals(OrbitalPartition(g));
  } else if (sub == "orbits") {
    std::size_t k = 0;
    for (const auto& orb : g.orbits()) {
      out << "orbit " << k++ << ':';
      for (Point x : orb) out << ' ' << x;
      out << '\n';
    }
  } else if (sub == "blocks") {
    std::size_t k = 0;
    for (const auto& b : all_block_systems(g)) {
      out << "system " << k++ << ':';
      for (const auto& blk : b.blocks()) {
        out << " {";
        for (std::size_t i = 0; i < blk.size(); ++i) out << (i ? " " : "") << blk[i];
        out << '}';
      }
      out << '\n';
    }
  } else {
    throw std::invalid_argument("unknown group tool '" + sub + "'");
  }
  return exit_ok;
}

}  // namespace ciforge
