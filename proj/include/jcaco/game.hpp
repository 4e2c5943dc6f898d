#pragma once

// Game engine: the access-association and computation-offloading games in
// complete-information (one activity state) and stochastic (expected load)
// forms, their exponential potential functions evaluated in the log domain,
// a brute-force checker for the potential sign property, and a
// Nash-equilibrium checker.
//
// Numerical note. The potentials are sums of base^load with bases like
// 2^1000, so a direct evaluation overflows immediately. Sign decisions only
// ever involve differences of a handful of terms, which we compare by
// factoring out the largest exponent: sum_i s_i * 2^(e_i - e_max) is exact
// enough in double precision to classify the sign whenever payoffs differ by
// at least the time granularity.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jcaco/env.hpp"
#include "jcaco/latency.hpp"
#include "jcaco/scenario.hpp"

namespace jcaco {

enum class InfoMode {
  complete,    // one known activity state; only active UEs play
  stochastic,  // expectation over activity; every UE plays
};

enum class PayoffKind { access, compute, total };

// Payoff basis for stochastic mode.
//   conditional_active: expected delay given the evaluating UE is active
//                       (own term weight 1). What a UE actually experiences;
//                       used by the learners and their equilibrium reports.
//   expected_load:      unconditional expected load of the chosen resource
//                       (own term weighted by the UE's own activity
//                       probability). The basis of the stochastic potential
//                       theorems, used by the sign checker and best response.
enum class StochasticBasis { conditional_active, expected_load };

struct GameView {
  const Scenario* scenario = nullptr;
  const UnitTimes* times = nullptr;
  InfoMode mode = InfoMode::stochastic;
  PayoffKind kind = PayoffKind::total;
  std::optional<ActivityState> activity;  // required iff mode == complete
  StochasticBasis basis = StochasticBasis::conditional_active;
};

GameView make_complete_view(const Scenario& s, const UnitTimes& t, PayoffKind kind,
                            ActivityState omega);
GameView make_stochastic_view(const Scenario& s, const UnitTimes& t, PayoffKind kind,
                              StochasticBasis basis = StochasticBasis::conditional_active);

// Delay cost of one UE under the view (lower is better). Complete mode
// requires the UE to be active (std::domain_error otherwise).
double payoff(const GameView& view, const StrategyProfile& prof, int ue);

// Potential of the access or compute game (kind == total is rejected:
// the joint game has one potential per subgame, not a combined one).
// log2_terms[r] = log2(base) * load_r; log2_value = log2(sum_r base^load_r).
struct PotentialValue {
  std::vector<double> log2_terms;
  double log2_value = 0.0;
};

PotentialValue potential(const GameView& view, const StrategyProfile& prof);

// Sign of (sum of +/- base^load terms) evaluated by max-exponent factoring.
// `before` terms enter negative, `after` positive. Returns -1, 0, or +1;
// |shifted sum| below 1e-12 classifies as 0.
int potential_delta_sign(std::span<const double> loads_before,
                         std::span<const double> loads_after, double log2_base);

struct SignViolation {
  std::uint64_t trial = 0;
  int ue = 0;
  std::string deviation;  // human-readable description of the move
  double payoff_delta = 0.0;
  int potential_sign = 0;
};

struct SignPropertyReport {
  std::uint64_t attempted = 0;  // sampled deviations
  std::uint64_t evaluated = 0;  // deviations with |payoff delta| >= granularity
  std::vector<SignViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Samples random profiles and random unilateral deviations and records every
// deviation whose payoff-delta sign disagrees with the potential-delta sign.
// Access games sample AP switches; compute games sample the three deviation
// cases (server switch, step change, joint switch). Deviations with
// |payoff delta| below the granularity are excluded from the property (they
// are counted in `attempted` only). kind == total is rejected.
SignPropertyReport check_sign_property(const GameView& view, std::uint64_t trials,
                                       std::uint64_t seed);

struct Deviation {
  int ue = 0;
  int ap = -1;
  int es = -1;
  int steps = -1;
  double improvement = 0.0;  // payoff decrease achievable (positive = profitable)
};

struct NeReport {
  bool is_ne = false;
  double max_improvement = 0.0;
  std::vector<Deviation> best_deviation;  // one entry per player with any alternative
};

// Enumerates every unilateral alternative (APs for access, servers at their
// optimal step counts for compute, both for total) and reports the most
// profitable deviation per player. In complete mode only active UEs are
// players. The profile is an equilibrium when no deviation improves the
// payoff by more than `tolerance`.
NeReport is_nash_equilibrium(const GameView& view, const StrategyProfile& prof,
                             double tolerance);

}  // namespace jcaco
