#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fgmrisk {

// Bad inputs: parameter ranges, dimension mismatches, unsupported pairings.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dependence parameters outside the admissible set: some reconstructed
// probability mass is negative. Carries the violating sign vector.
class inadmissible_error : public validation_error {
 public:
  inadmissible_error(const std::string& what, std::vector<int> epsilon, double mass)
      : validation_error(what), epsilon_(std::move(epsilon)), mass_(mass) {}
  const std::vector<int>& epsilon() const noexcept { return epsilon_; }
  double mass() const noexcept { return mass_; }

 private:
  std::vector<int> epsilon_;
  double mass_;
};

// Numeric breakdowns: truncation overflow, transform residues, failed inversions.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fgmrisk
