#pragma once

// Multi-agent stochastic learning built on linear reward-inaction automata.
// Each UE holds a mixed strategy over access points (and, in the offloading
// game, over edge servers), samples an action when active, observes its
// delay, converts it to a [0, 1] reward against a fixed worst-case
// normalizer, and reinforces the chosen action. Inactive UEs keep their
// strategies bit-identical. The two learners are independent; the combined
// runner executes them sequentially and decodes pure profiles by row argmax.

#include <cstdint>
#include <functional>
#include <vector>

#include "jcaco/env.hpp"
#include "jcaco/game.hpp"
#include "jcaco/latency.hpp"
#include "jcaco/scenario.hpp"
#include "jcaco/util.hpp"

namespace jcaco {

enum class DelayMode {
  expected,  // observe the conditional expected delay of the chosen resource
  realized,  // observe the realized slot delay
};

// Fixed a-priori reward normalizers: per-UE bound on the delays observed
// along the learning trajectory, evaluated on the fading-free channel at
// initial positions (own unit time plus the uniform-mixture expected load,
// at the worst resource). The reward clamp covers rare transients above it.
struct RewardNormalizers {
  std::vector<double> access_bound_s;   // one per UE
  std::vector<double> compute_bound_s;  // one per UE
};

RewardNormalizers compute_normalizers(const Scenario& s, const UnitTimes& t);

// Linear reward-inaction update. Non-chosen entries become p * (1 - rate *
// reward); the chosen entry is 1 - sum(others), so the row stays exactly on
// the simplex. reward == 0 returns the input bit-identically. Throws
// std::domain_error for reward outside [0, 1] and std::invalid_argument for
// rate outside (0, 1).
std::vector<double> lri_update(std::span<const double> probs, int chosen, double reward,
                               double rate);

// Rewards: 1 - observed_delay / normalizer, clamped into [0, 1]. In expected
// mode the observation is the conditional expected delay of the UE's chosen
// resource under the current pure action profile; in realized mode it is the
// realized slot delay (requires the activity state, UE must be active).
double access_reward(const Scenario& s, const UnitTimes& t, const RewardNormalizers& norm,
                     const StrategyProfile& prof, int ue, DelayMode mode,
                     const ActivityState* omega);
double compute_reward(const Scenario& s, const RewardNormalizers& norm,
                      const StrategyProfile& prof, int ue, DelayMode mode,
                      const ActivityState* omega);

struct LearnConfig {
  double rate = 0.1;          // learning rate (alpha for access, beta for offload)
  double delta = 1e-3;        // convergence: max_n ||row change||_2 < delta
  int max_iterations = 10000;
  DelayMode delay_mode = DelayMode::expected;
  std::uint64_t seed = 0;
  bool fading = false;        // redraw channel fading every iteration (access game)
  bool mobility = false;      // random-walk UE positions every iteration (access game)
  double mobility_step_m = 10.0;
  bool record_trace = true;
};

struct IterationRecord {
  int iteration = 0;
  double objective_s = 0.0;           // expected system delay of the learned kind
  double max_strategy_delta = 0.0;    // max over UEs of ||row change||_2
  std::vector<double> ue_delays_s;    // conditional expected per-UE delay
};

struct LearnResult {
  Grid<double> probs;             // final mixed strategies, one row per UE
  std::vector<int> final_actions; // current pure actions at the last iteration
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iterations = 0;
};

// Observer hook invoked once per iteration after the strategy update, with
// the slot's activity state and the post-update strategy matrix.
using LearnObserver = std::function<void(int iteration, const ActivityState&, const Grid<double>&)>;

// Access-association learner: mixed strategies over access points.
LearnResult run_alg1(const Scenario& s, const LearnConfig& cfg, const LearnObserver& observe = {});

// Computation-offloading learner: mixed strategies over edge servers, step
// counts pinned to the per-pair optimum (precomputed up front).
LearnResult run_alg2(const Scenario& s, const LearnConfig& cfg, const LearnObserver& observe = {});

struct JcacoConfig {
  double alpha = 0.1;
  double beta = 0.1;
  double delta = 1e-3;
  int max_iterations = 10000;
  DelayMode delay_mode = DelayMode::expected;
  std::uint64_t seed = 0;
  bool fading = false;
  bool mobility = false;
  double mobility_step_m = 10.0;
  bool record_trace = true;
  double ne_tolerance = 1e-6;
};

struct JcacoResult {
  LearnResult access;
  LearnResult compute;
  StrategyProfile decoded;     // argmax decode, ties to the lowest index
  NeReport ne_access;          // equilibrium check of the decoded access profile
  NeReport ne_compute;         // equilibrium check of the decoded offload profile
  double final_objective_s = 0.0;  // expected system delay of the decoded profile
  bool converged = false;          // both learners met the delta criterion
};

JcacoResult run_jcaco(const Scenario& s, const JcacoConfig& cfg);

// Argmax decode of a strategy matrix; ties resolve to the lowest index.
std::vector<int> decode_pure(const Grid<double>& probs);

// Monte-Carlo estimate of the expected access-strategy update per unit
// learning rate, E[P(tau+1) - P(tau) | P] / rate: the drift field whose
// stable zeros are the learner's equilibria. Activity and every UE's action
// are drawn fresh per sample; rewards use the conditional expected delay.
Grid<double> estimate_drift(const Scenario& s, const Grid<double>& ap_probs, int n_samples,
                            std::uint64_t seed);

}  // namespace jcaco
