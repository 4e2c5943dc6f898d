#pragma once

// Verification suites exposed through `jcaco verify`: executable forms of the
// model's load-bearing guarantees. Each suite returns a JSON report and an
// ok flag; the CLI maps violations to exit code 2.
//
//   sign-property - random instances x 4 game views (access/compute x
//                   complete/stochastic); every sampled unilateral deviation
//                   with a payoff change of at least the granularity must
//                   move the potential the same way.
//   expectation   - closed-form expected loads must match full enumeration
//                   over the activity sample space to 1e-12 relative and a
//                   Monte-Carlo estimate to 3 standard errors.
//   ne            - complete-information best response must terminate, in
//                   fewer moves than the strategy space size, strictly
//                   decreasing the potentials, at a Nash equilibrium.

#include <cstdint>
#include <string>

#include "json.hpp"

namespace jcaco {

struct VerifyConfig {
  std::uint64_t trials = 10000;  // sign-property: deviations per game view
  std::uint64_t seed = 7;
  int instances = 50;            // sign-property / ne instance count
};

struct VerifyOutcome {
  bool ok = false;
  nlohmann::json report;
};

VerifyOutcome verify_sign_property(const VerifyConfig& cfg);
VerifyOutcome verify_expectation(const VerifyConfig& cfg);
VerifyOutcome verify_ne(const VerifyConfig& cfg);

// Dispatch by suite name; throws std::invalid_argument for unknown names.
VerifyOutcome run_verify_suite(const std::string& suite, const VerifyConfig& cfg);

}  // namespace jcaco
