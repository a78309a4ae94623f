#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ciforge/ea_structure.hpp"
#include "ciforge/harness.hpp"
#include "ciforge/text_io.hpp"

using namespace ciforge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("ciforge_test_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& body = {}) const {
    fs::path f = path / name;
    if (!body.empty()) std::ofstream(f) << body;
    return f.string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::function<int()>& f) {
  std::ostringstream err;
  return run_guarded(f, err);
}

RunConfig config(unsigned p, unsigned n) {
  RunConfig c;
  c.p = p;
  c.n = n;
  return c;
}

}  // namespace

TEST_CASE("census command exit codes") {
  std::ostringstream out, err;
  RunConfig c = config(2, 2);
  CHECK(run([&] { return cmd_census(c, out, err); }) == exit_ok);
  CHECK(out.str().find("total: orbits=8 iso=8") != std::string::npos);

  RunConfig big = config(2, 5);
  CHECK(run([&] { return cmd_census(big, out, err); }) == exit_too_large);
  RunConfig bad = config(6, 1);
  CHECK(run([&] { return cmd_census(bad, out, err); }) == exit_usage);
  RunConfig capped = config(3, 5);
  CHECK(run([&] { return cmd_census(capped, out, err); }) == exit_usage);
}

TEST_CASE("census reports are reproducible through the cache") {
  TempDir dir;
  RunConfig c = config(2, 3);
  c.cache_path = dir.file("cache.txt");
  c.out_path = dir.file("first.txt");
  std::ostringstream out, err;
  CHECK(cmd_census(c, out, err) == exit_ok);
  c.out_path = dir.file("second.txt");
  CHECK(cmd_census(c, out, err) == exit_ok);
  CHECK(slurp(dir.file("first.txt")) == slurp(dir.file("second.txt")));

  RunConfig other = c;
  other.seed = 4;
  CHECK(run([&] { return cmd_census(other, out, err); }) == exit_usage);

  RunConfig quiet = config(2, 2);
  quiet.verify = false;
  std::ostringstream q;
  CHECK(cmd_census(quiet, q, err) == exit_ok);
  CHECK(q.str().rfind("# verification disabled\n", 0) == 0);
}

TEST_CASE("sampled census is seeded") {
  RunConfig c = config(3, 2);
  c.mode = CensusMode::sampled;
  c.trials = 40;
  c.seed = 7;
  std::ostringstream a, b, err;
  CHECK(cmd_census(c, a, err) == exit_ok);
  CHECK(cmd_census(c, b, err) == exit_ok);
  CHECK(a.str() == b.str());
}

TEST_CASE("conj produces certificates that verify offline") {
  TempDir dir;
  std::string id = dir.file("id.txt", format_permutation(Permutation::identity(16)) + "\n");
  std::string pi = dir.file("pi.txt", format_permutation(trial_pi(16, 77)) + "\n");
  std::string other = dir.file("other.txt", format_permutation(trial_pi(16, 78)) + "\n");
  std::ostringstream out, err;

  RunConfig c = config(2, 4);
  c.out_path = dir.file("cert_id.txt");
  CHECK(cmd_conj(c, id, out, err) == exit_ok);
  CHECK(cmd_verify_certificate(c.out_path, id, out, err) == exit_ok);

  c.out_path = dir.file("cert.txt");
  CHECK(cmd_conj(c, pi, out, err) == exit_ok);
  CHECK(slurp(c.out_path).find("verified: yes") != std::string::npos);
  CHECK(cmd_verify_certificate(c.out_path, pi, out, err) == exit_ok);
  CHECK(cmd_verify_certificate(c.out_path, other, out, err) == exit_check_failed);

  // Corrupt one image of the composite: swap two entries on that line.
  std::string text = slurp(c.out_path);
  std::size_t line = text.find("composite perm 16: ");
  REQUIRE(line != std::string::npos);
  std::istringstream fields(text.substr(line + 19));
  std::vector<int> images(16);
  for (int& x : images) fields >> x;
  std::swap(images[3], images[4]);
  std::string fixed = "composite perm 16:";
  for (int x : images) fixed += " " + std::to_string(x);
  std::size_t end = text.find('\n', line);
  text.replace(line, end - line, fixed);
  std::string bad = dir.file("bad_cert.txt", text);
  CHECK(cmd_verify_certificate(bad, pi, out, err) == exit_check_failed);

  std::string junk = dir.file("junk.txt", "perm 16: 1 1 2\n");
  CHECK(run([&] { return cmd_conj(c, junk, out, err); }) == exit_usage);
  CHECK(run([&] { return cmd_verify_certificate(junk, pi, out, err); }) == exit_usage);

  RunConfig seeded = config(2, 4);
  seeded.seed = 12;
  std::ostringstream a, b;
  CHECK(cmd_conj(seeded, "", a, err) == exit_ok);
  CHECK(cmd_conj(seeded, "", b, err) == exit_ok);
  CHECK(a.str() == b.str());
}

TEST_CASE("campaign command") {
  RunConfig c = config(2, 3);
  c.trials = 5;
  c.seed = 3;
  std::ostringstream out, err;
  CHECK(cmd_campaign(c, out, err) == exit_ok);
  CHECK(out.str().find("verified: 5") != std::string::npos);
}

TEST_CASE("group tools") {
  TempDir dir;
  std::ostringstream out, err;
  std::string arcless = dir.file("arcless.txt", "set 2 2:\n");
  CHECK(cmd_group_tools("aut", arcless, out, err) == exit_ok);
  CHECK(out.str().find("order: 24") != std::string::npos);

  std::string klein = dir.file("klein.txt", "perm 4: 1 0 3 2\nperm 4: 2 3 0 1\n");
  std::ostringstream tc;
  CHECK(cmd_group_tools("two-closure", klein, tc, err) == exit_ok);
  CHECK(tc.str().find("order: 4") != std::string::npos);

  std::ostringstream orb;
  CHECK(cmd_group_tools("orbitals", klein, orb, err) == exit_ok);
  CHECK(orb.str().find("orbital 3: ") != std::string::npos);

  std::string wreath;
  PermutationGroup w = wreath_sylow(2, 4);
  for (const auto& g : w.generators()) wreath += format_permutation(g) + "\n";
  std::ostringstream blocks;
  CHECK(cmd_group_tools("blocks", dir.file("w.txt", wreath), blocks, err) == exit_ok);
  const std::string listing = blocks.str();
  CHECK(std::count(listing.begin(), listing.end(), '\n') == 5);

  CHECK(run([&] { return cmd_group_tools("nope", klein, out, err); }) == exit_usage);
  CHECK(run([&] { return cmd_group_tools("orbits", dir.file("missing.txt"), out, err); }) == exit_usage);
}
