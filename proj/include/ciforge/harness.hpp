#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "ciforge/dci_verify.hpp"

namespace ciforge {

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_usage = 2,
  exit_too_large = 3,
  exit_contract = 4,
};

struct RunConfig {
  unsigned p = 2, n = 1;
  CensusMode mode = CensusMode::exhaustive;
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 0;
  double timeout_secs = 120;
  std::string out_path, cache_path;
  bool verify = true;
};

/// Throws std::invalid_argument unless p is prime, n >= 1 and p^n is within
/// the point cap.
void validate(const RunConfig& c);

/// Runs `body`, mapping exceptions onto the exit-code table and printing a
/// diagnostic (with the seed for contract violations) to `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

// Each command writes its report to config.out_path when set, else to `out`.
int cmd_census(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_campaign(const RunConfig& c, std::ostream& out, std::ostream& err);
/// Empty `pi_file` draws a uniform pi from the seed.
int cmd_conj(const RunConfig& c, const std::string& pi_file, std::ostream& out, std::ostream& err);
int cmd_verify_certificate(const std::string& cert_file, const std::string& pi_file,
                           std::ostream& out, std::ostream& err);
/// `aut` reads a connection-set file; `two-closure`, `orbits`, `orbitals`
/// and `blocks` read generator files.
int cmd_group_tools(const std::string& sub, const std::string& input, std::ostream& out,
                    std::ostream& err);

}  // namespace ciforge
