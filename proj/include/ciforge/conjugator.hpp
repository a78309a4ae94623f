#pragma once

// Step-by-step conjugation of a regular elementary abelian Q onto R_L inside
// the 2-closure of G = <R_L, Q>.
//
// The pipeline works in a frame where G preserves the standard block systems
// B_1 < ... < B_{n-1} and uses base point v = 0. Every step returns a
// conjugator psi; the caller replaces Q by psi^-1 Q psi and rebuilds G.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ciforge/block_system.hpp"
#include "ciforge/ea_structure.hpp"
#include "ciforge/perm_group.hpp"
#include "ciforge/refine_search.hpp"
#include "ciforge/two_closure.hpp"

namespace ciforge {

enum class StepTag { SYLOW, L3_1, C3_2, L4_1, L5_3, L5_4_CASE2, FINAL };

std::string_view tag_name(StepTag t);
/// Throws ParseError on an unknown name.
StepTag parse_tag(std::string_view name);

struct ConjugationStep {
  StepTag tag = StepTag::FINAL;
  Permutation conjugator;
  std::uint64_t group_fingerprint = 0;  // hash of <R, Q> generators before the step
  bool verified_in_2closure = false;    // membership in G for SYLOW
};

struct ConjugationCertificate {
  unsigned p = 0, n = 0;
  std::uint64_t seed = 0;
  std::vector<ConjugationStep> steps;
  Permutation composite;  // steps[0] * steps[1] * ...
  bool verified = false;
};

/// Counts of runtime property checks; every failed check throws
/// ContractViolation instead of being counted.
struct PropertyLog {
  std::uint64_t block_agreement = 0;      // tau' agrees with tau on all blocks
  std::uint64_t class_local = 0;          // rho_E lies in G^(2)
  std::uint64_t psi_membership = 0;       // step conjugator lies in G^(2)
  std::uint64_t psi_conjugation = 0;      // psi^-1 tau' psi = tau
  std::uint64_t alpha_commutation = 0;    // psi commutes with alpha
  std::uint64_t consistency_sum = 0;      // sum of c over a tau-orbit is 0 mod p
  std::uint64_t orbit_shape = 0;          // G_v orbits meet B_2 blocks in 1, p or p^2 points
  std::uint64_t sim_symmetry = 0;         // v ~ w iff w ~ v
  std::uint64_t tau2_orbit = 0;           // tau_2(C_v) inside one G_v orbit
  std::uint64_t centrality = 0;           // tau_0, tau_1 central after C3_2
  std::uint64_t final_nodes = 0;          // search nodes in the final step
  std::map<std::size_t, std::uint64_t> equiv2_class_counts;
  std::map<std::string, std::uint64_t> routes;

  void merge(const PropertyLog& other);
};

/// Partition into the classes of the relation: blocks B, B' equivalent iff
/// every element of the kernel K on b1 is trivial on B exactly when it is
/// trivial on B'.
struct EquivClasses {
  std::vector<std::vector<Point>> classes;  // ascending, ordered by smallest point
  std::vector<std::size_t> class_of;
};

/// x and x' are equivalent iff the pointwise stabilizers in K of their blocks agree.
/// Throws std::invalid_argument unless b1 is G-invariant.
EquivClasses equiv_classes(const PermutationGroup& g, const BlockSystem& b1);

/// rho on E, identity elsewhere; throws ContractViolation("L2_4") unless the
/// result preserves the orbitals `o`.
Permutation class_local_element(const OrbitalPartition& o, const std::vector<Point>& e,
                                const Permutation& rho);

/// Current Q together with G = <R_L, Q> and the derived tau data, rebuilt
/// from scratch after every step.
class PipelineState {
 public:
  PipelineState(const FpSpace& space, std::vector<Permutation> q_gens, PropertyLog& log);

  /// Q <- psi^-1 Q psi.
  void apply(const Permutation& psi);

  const FpSpace& space() const noexcept { return space_; }
  const std::vector<Permutation>& q_generators() const noexcept { return q_gens_; }
  const RegularGroupTable& q() const noexcept { return *table_; }
  const PermutationGroup& group() const noexcept { return group_; }
  const OrbitalPartition& orbitals() const noexcept { return orbitals_; }
  const TauFamily& taus() const noexcept { return taus_; }
  /// G_v for v = 0.
  const PermutationGroup& vertex_stabilizer();
  std::uint64_t fingerprint() const;
  bool q_contains(const Permutation& g) const { return table_->contains(g); }
  PropertyLog& log() noexcept { return log_; }

  /// Checks membership of psi in the 2-closure and counts it.
  void require_in_closure(const Permutation& psi, const char* tag);

 private:
  void rebuild();

  FpSpace space_;
  std::vector<Permutation> q_gens_;
  std::optional<RegularGroupTable> table_;
  PermutationGroup group_;
  OrbitalPartition orbitals_;
  TauFamily taus_;
  std::optional<PermutationGroup> stabilizer_;
  PropertyLog& log_;
};

/// Conjugator psi in G^(2) with psi^-1 tau' psi = tau, built blockwise from
/// powers of `zeta` (whose orbits are the blocks of b1). Requires zeta in Q
/// and tau^-1 tau' fixing every block of b1. Checks that psi commutes with
/// each alpha that fixes every equivalence class.
Permutation fixing_blocks_psi(PipelineState& st, const Permutation& tau,
                              const Permutation& tau_prime, const BlockSystem& b1, Point zeta,
                              const std::vector<Permutation>& alphas);

/// Puts tau_1 into Q; afterwards tau_0 and tau_1 are central in G.
ConjugationStep centralize_tau01(PipelineState& st);

/// For n = 4: a step putting tau_2 into Q when tau_2^-1 tau_2' fixes every
/// block of one of the p + 1 size-p systems inside B_2, or when G_{v,B_2}
/// fixes those blocks inside two independent B_2 blocks.
std::optional<ConjugationStep> easy_case(PipelineState& st);

struct Equiv2Classes {
  std::vector<std::vector<Point>> classes;
  std::vector<std::size_t> class_of;
  /// Points w with v ~ w; the relation is translation invariant, so x ~ y
  /// iff y - x is listed here.
  std::vector<Point> sim_differences;
};

Equiv2Classes sim_and_equiv2(PipelineState& st);

/// n = 4 with p or p^2 classes: puts tau_2 into Q.
ConjugationStep wreathing_phi(PipelineState& st, const Equiv2Classes& e2);

/// n = 4 with a single class: puts tau_2 into Q.
ConjugationStep lack_of_wreathing_phi(PipelineState& st, const Equiv2Classes& e2);

/// Requires tau_0..tau_{n-2} in Q; finds psi in G^(2) fixing v with
/// psi^-1 Q psi = R_L by backtracking over images of the tau_i.
ConjugationStep final_step(PipelineState& st, std::uint64_t node_budget = 10'000'000);

/// Full pipeline for Q = <q_gens>. Supports n <= 4; unless `verify` is off the
/// certificate is replayed before it is returned. Throws ContractViolation
/// carrying `seed`.
ConjugationCertificate conjugate_full(const FpSpace& space, const std::vector<Permutation>& q_gens,
                                      std::uint64_t seed, PropertyLog* log = nullptr,
                                      bool verify = true);

/// Generators pi^-1 tau_i pi of pi^-1 R_L pi.
std::vector<Permutation> conjugated_translations(const FpSpace& space, const Permutation& pi);

}  // namespace ciforge
