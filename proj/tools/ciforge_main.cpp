// ciforge: DCI census, conjugation certificates and group utilities for
// elementary abelian groups of small rank.

#include <iostream>
#include <map>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "ciforge/harness.hpp"

using namespace ciforge;

namespace {

// Returns the --p and --n options so callers can decide when they are needed.
std::pair<CLI::Option*, CLI::Option*> add_space_flags(CLI::App* cmd, RunConfig& c, bool required = true) {
  auto* p = cmd->add_option("--p", c.p, "prime")->required(required);
  auto* n = cmd->add_option("--n", c.n, "rank")->required(required);
  cmd->add_option("--seed", c.seed, "random seed (recorded in outputs)");
  cmd->add_option("--out", c.out_path, "write the report here instead of stdout");
  return {p, n};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ciforge: Cayley digraph isomorphism checks over elementary abelian p-groups"};
  app.require_subcommand(1);
  RunConfig cfg;
  bool no_verify = false;
  std::string pi_file, cert_file, tool, input;

  auto* census = app.add_subcommand("census", "count Aut(R)-orbits and isomorphism classes of connection sets");
  add_space_flags(census, cfg);
  std::map<std::string, CensusMode> modes{{"exhaustive", CensusMode::exhaustive}, {"sample", CensusMode::sampled}};
  census->add_option("--mode", cfg.mode, "exhaustive|sample")->transform(CLI::CheckedTransformer(modes));
  census->add_option("--trials", cfg.trials, "samples in sample mode");
  census->add_option("--cache", cfg.cache_path, "resumable canonical-form cache (exhaustive mode)");
  census->add_flag("--no-verify", no_verify, "skip the Burnside cross-check");

  auto* campaign = app.add_subcommand("campaign", "conjugate pi^-1 R pi back onto R for seeded random pi");
  add_space_flags(campaign, cfg);
  campaign->add_option("--trials", cfg.trials, "number of random pi");
  campaign->add_option("--timeout-secs", cfg.timeout_secs, "per-trial timeout, 0 for none");

  auto* conj = app.add_subcommand("conj", "produce a conjugation certificate for one pi");
  // --p and --n are only needed when producing, not when replaying.
  auto [conj_p, conj_n] = add_space_flags(conj, cfg, false);
  conj->add_option("--pi", pi_file, "file with a `perm N:` record; omitted: uniform pi from --seed");
  conj->add_flag("--no-verify", no_verify, "skip replaying the certificate");
  conj->require_subcommand(0, 1);
  auto* verify = conj->add_subcommand("verify", "replay a certificate against pi");
  verify->add_option("--cert", cert_file, "certificate file")->required();
  verify->add_option("--pi", pi_file, "file with the pi the certificate claims to handle")->required();

  auto* group = app.add_subcommand("group", "aut, two-closure, orbits, orbitals, blocks");
  group->add_option("tool", tool, "aut|two-closure|orbits|orbitals|blocks")
      ->required()
      ->check(CLI::IsMember({"aut", "two-closure", "orbits", "orbitals", "blocks"}));
  group->add_option("input", input, "connection-set file (aut) or generator file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }
  cfg.verify = !no_verify;
  if (conj->parsed() && !verify->parsed() && (conj_p->count() == 0 || conj_n->count() == 0)) {
    std::cerr << "conj: --p and --n are required\n";
    return exit_usage;
  }

  return run_guarded(
      [&] {
        if (census->parsed()) return cmd_census(cfg, std::cout, std::cerr);
        if (campaign->parsed()) return cmd_campaign(cfg, std::cout, std::cerr);
        if (verify->parsed()) return cmd_verify_certificate(cert_file, pi_file, std::cout, std::cerr);
        if (conj->parsed()) return cmd_conj(cfg, pi_file, std::cout, std::cerr);
        return cmd_group_tools(tool, input, std::cout, std::cerr);
      },
      std::cerr);
}
