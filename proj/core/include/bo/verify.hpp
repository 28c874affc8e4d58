#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bo {

struct CheckResult {
  std::string name;
  double tol = 0;
  double worst = 0;  // largest residual / violation seen
  std::size_t checked = 0;
  std::size_t failed = 0;
  bool pass() const { return failed == 0 && checked > 0; }
};

struct SuiteReport {
  std::string name;
  std::size_t instances = 0;
  std::vector<CheckResult> checks;
  bool pass() const;
};

// Randomised exact identities of the Gram-space solver (n in [5,60],
// p in [n+1,600], lambda in {0, +, -} inside the floor, eta in {0,.1,.3}).
// s_perturbation corrupts S inside decompose to prove the suite can fail.
SuiteReport identity_suite(std::uint64_t seed, std::size_t instances,
                           double s_perturbation = 0.0);

// Randomised inequalities between the closed-form quantities on admissible instances.
SuiteReport inequality_suite(std::uint64_t seed, std::size_t instances);

std::string format_report(const SuiteReport& r);

}  // namespace bo
