#pragma once

// Benchmark strategies, all consuming the same latency tables and payoffs as
// the learners:
//   best response  - round-robin improving moves until a fixed point
//   mxFP           - simultaneous best response to a fixed uniform opponent
//                    model; play frequencies only drive the stop test
//   selfish        - nearest AP, fastest server, no coordination
//   RARO           - uniform random association and offloading

#include <cstdint>
#include <vector>

#include "jcaco/game.hpp"
#include "jcaco/latency.hpp"
#include "jcaco/scenario.hpp"

namespace jcaco {

struct BaselineConfig {
  int max_rounds = 500;
  double tolerance = 1e-9;  // BR: minimum payoff improvement to move;
                            // mxFP: L-inf frequency-stabilization threshold (use 1e-3)
  std::uint64_t seed = 0;
};

struct MoveRecord {
  int ue = 0;
  int old_ap = 0, new_ap = 0;
  int old_es = 0, new_es = 0;
  int old_steps = 0, new_steps = 0;
};

struct BestResponseResult {
  StrategyProfile profile;
  int rounds = 0;   // full passes over the UEs
  int moves = 0;    // strategy changes
  bool converged = false;  // a full pass made no move before max_rounds
  std::vector<MoveRecord> move_log;
};

// Sequential best response in ascending UE order from a seeded random start;
// each player moves to its argmin (AP, server at optimal steps) given the
// others. In a stochastic view the expected_load basis is forced (that payoff
// carries the potential guarantee, so the dynamic cannot cycle); in a
// complete view only active UEs play. The move log lets tests verify that
// every improving move strictly decreased the matching potential.
BestResponseResult run_best_response(const Scenario& s, const UnitTimes& t,
                                     const GameView& view, const BaselineConfig& cfg);

struct MxfpResult {
  StrategyProfile profile;  // actions played in the last round
  int rounds = 0;
  bool converged = false;   // empirical frequencies stabilized before max_rounds
};

// Fictitious play with simultaneous moves against a fixed uniform opponent
// model: every round each UE best-responds assuming each other UE mixes
// uniformly over resources (contributing p * unit_time / #actions to every
// resource) and never revises that belief from observed play. Empirical
// play frequencies are tracked only for the stop test: stops when they
// change by less than cfg.tolerance in L-inf, or at max_rounds.
MxfpResult run_mxfp(const Scenario& s, const UnitTimes& t, const BaselineConfig& cfg);

// Nearest AP (tie: lowest index), fastest server (tie: lowest index),
// optimal steps. Deterministic.
StrategyProfile run_selfish(const Scenario& s, const UnitTimes& t);

// Uniform random AP and server per UE, optimal steps.
StrategyProfile run_raro(const Scenario& s, const UnitTimes& t, std::uint64_t seed);

}  // namespace jcaco
