#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ciforge {

// Raised when a runtime check of a proven structural property fails. Any
// occurrence is a bug or a misreading of the construction, never a normal
// outcome; the tag names the construction step that failed.
class ContractViolation : public std::runtime_error {
 public:
  ContractViolation(std::string tag, const std::string& what,
                    std::uint64_t seed = 0)
      : std::runtime_error("contract violation [" + tag + "]: " + what),
        tag_(std::move(tag)),
        seed_(seed) {}

  const std::string& tag() const noexcept { return tag_; }
  std::uint64_t seed() const noexcept { return seed_; }
  void set_seed(std::uint64_t s) noexcept { seed_ = s; }

 private:
  std::string tag_;
  std::uint64_t seed_;
};

// Malformed text input (permutation, set, certificate files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bounded search ran out of budget before reaching a verdict.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ciforge
