#include "ciforge/certificate.hpp"

#include <istream>
#include <sstream>

#include "ciforge/errors.hpp"
#include "ciforge/text_io.hpp"

namespace ciforge {

std::string format_certificate(const ConjugationCertificate& c) {
  std::ostringstream out;
  out << "certificate " << c.p << " " << c.n << " " << c.seed << "\n";
  for (std::size_t k = 0; k < c.steps.size(); ++k)
    out << "step " << k << " " << tag_name(c.steps[k].tag) << " "
        << format_permutation(c.steps[k].conjugator) << "\n";
  out << "composite " << format_permutation(c.composite) << "\n";
  if (c.verified) out << "verified: yes\n";
  return out.str();
}

ConjugationCertificate parse_certificate(std::istream& in) {
  ConjugationCertificate c;
  std::string line;
  bool header = false, composite = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "certificate") {
      if (header) throw ParseError("duplicate certificate header");
      if (!(ls >> c.p >> c.n >> c.seed)) throw ParseError("bad certificate header: " + line);
      header = true;
    } else if (word == "step") {
      if (!header || composite) throw ParseError("step outside certificate body");
      std::size_t k;
      std::string tag;
      if (!(ls >> k >> tag)) throw ParseError("bad step line: " + line);
      if (k != c.steps.size()) throw ParseError("steps out of order");
      std::string rest;
      std::getline(ls, rest);
      c.steps.push_back({parse_tag(tag), parse_permutation(rest), 0, false});
    } else if (word == "composite") {
      if (!header) throw ParseError("composite before header");
      std::string rest;
      std::getline(ls, rest);
      c.composite = parse_permutation(rest);
      composite = true;
    } else if (word == "verified:") {
      std::string v;
      ls >> v;
      c.verified = v == "yes";
    } else {
      throw ParseError("unrecognised certificate line: " + line);
    }
  }
  if (!header || !composite) throw ParseError("certificate is incomplete");
  return c;
}

VerifyOutcome verify_certificate(const ConjugationCertificate& c,
                                 const std::vector<Permutation>& q_gens) {
  auto fail = [](std::string why) { return VerifyOutcome{false, std::move(why)}; };
  FpSpace space(c.p, c.n);
  const std::size_t n = space.size();
  if (c.composite.degree() != n) return fail("composite has the wrong degree");
  std::vector<Permutation> r;
  for (unsigned i = 0; i < c.n; ++i) r.push_back(space.translation(space.unit(i)));
  std::vector<Permutation> q = q_gens;
  Permutation product = Permutation::identity(n);
  for (std::size_t k = 0; k < c.steps.size(); ++k) {
    const auto& st = c.steps[k];
    std::string where = "step " + std::to_string(k) + " " + std::string(tag_name(st.tag));
    if (st.conjugator.degree() != n) return fail(where + ": wrong degree");
    std::vector<Permutation> g = r;
    g.insert(g.end(), q.begin(), q.end());
    bool ok = st.tag == StepTag::SYLOW ? MembershipOracle(n, g).contains(st.conjugator)
                                       : in_two_closure(OrbitalPartition(n, g), st.conjugator);
    if (!ok)
      return fail(where + (st.tag == StepTag::SYLOW ? ": not in <R, Q>"
                                                    : ": not in the 2-closure of <R, Q>"));
    for (auto& x : q) x = conjugate(x, st.conjugator);
    product = compose(product, st.conjugator);
  }
  if (product != c.composite) return fail("composite differs from the product of the steps");
  for (const auto& x : q_gens)
    if (!space.as_translation(conjugate(x, c.composite)))
      return fail("composite does not conjugate Q onto R");
  return {true, {}};
}

}  // namespace ciforge
