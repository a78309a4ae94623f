#pragma once

// Text form and independent replay of conjugation certificates.
//
//   certificate p n seed
//   step <k> <TAG> perm N: ...
//   composite perm N: ...
//   verified: yes

#include <iosfwd>
#include <string>
#include <vector>

#include "ciforge/conjugator.hpp"

namespace ciforge {

std::string format_certificate(const ConjugationCertificate& c);
/// Throws ParseError on malformed input.
ConjugationCertificate parse_certificate(std::istream& in);

struct VerifyOutcome {
  bool ok = false;
  std::string failure;  // names the failing step when !ok
};

/// Replays the steps against Q = <q_gens>: each SYLOW conjugator must lie in
/// <R_L, Q>, every other conjugator must preserve the orbitals of <R_L, Q>,
/// the composite must equal the product of the steps, and it must carry
/// every generator of Q into R_L.
VerifyOutcome verify_certificate(const ConjugationCertificate& c,
                                 const std::vector<Permutation>& q_gens);

}  // namespace ciforge
