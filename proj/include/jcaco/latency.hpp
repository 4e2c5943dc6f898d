#pragma once

// Latency and energy model: Shannon capacities, per-task transmission times,
// proportional-fair access-point loads, inference-step compute times, edge
// server loads, accumulated error of iterative inference, and the optimal
// (minimal feasible) step count per UE/server pair.
//
// Loads come in two forms used throughout the games:
//   realized  - given one activity state, only active UEs contribute, weight 1
//   expected  - every UE contributes weighted by its activity probability
// A third, the expectation conditioned on one UE being active (that UE at
// weight 1, everyone else at p), is what a UE experiences on average and is
// the basis for learning rewards.

#include <span>
#include <vector>

#include "jcaco/env.hpp"
#include "jcaco/scenario.hpp"
#include "jcaco/util.hpp"

namespace jcaco {

// One pure strategy per UE: chosen access point, chosen edge server, and the
// inference step count used at that server.
struct StrategyProfile {
  std::vector<int> ap_choice;
  std::vector<int> es_choice;
  std::vector<int> steps;
  bool operator==(const StrategyProfile&) const = default;
};

struct DelayBreakdown {
  std::vector<double> access_s;   // per UE
  std::vector<double> compute_s;  // per UE
  std::vector<double> total_s;    // per UE
  std::vector<double> ap_load_s;  // per AP
  std::vector<double> es_load_s;  // per server
};

// Total thermal noise power over a band, from a PSD given in dBm/Hz.
double noise_power_watts(double noise_psd_dbm_per_hz, double bandwidth_hz);

// Shannon capacity W * log2(1 + rho * h / N0W) in bit/s. All of bandwidth,
// power, and gain must be positive (std::domain_error otherwise).
double channel_capacity_bps(double bandwidth_hz, double tx_power_w, double gain,
                            double noise_psd_dbm_per_hz);

// Time to push one task payload through the UE->AP link.
double unit_tx_time_s(const Scenario& s, const ChannelRealization& ch, int ue, int ap);

// Busy time one task puts on a server: flops_per_step * steps / flops_per_sec.
double unit_compute_time_s(const EdgeServer& server, int steps);

// Accumulated error after `steps` denoising steps of the model hosted on
// server k, for UE `ue`: forward_error_scale * exp(-fitness * steps).
double aec(const Scenario& s, int ue, int server, int steps);

// Minimal step count meeting the UE's error threshold on that server,
// floored at min_steps. Always feasible because error decays to zero.
int optimal_steps(const Scenario& s, int ue, int server, int min_steps);

// Precomputed per-pair tables shared by the games, the learners, and every
// baseline: unit transmission times, optimal step counts, and the compute
// times at those optimal counts.
struct UnitTimes {
  Grid<double> tx_s;           // N x M
  Grid<int> opt_steps;         // N x K
  Grid<double> opt_compute_s;  // N x K
};

UnitTimes compute_unit_times(const Scenario& s, const ChannelRealization& ch);

// --- access-point loads (proportional-fair sharing: every UE on an AP
// experiences the AP's total load as its access delay) ---

std::vector<double> realized_ap_loads(const Scenario& s, const UnitTimes& t,
                                      const StrategyProfile& prof, const ActivityState& omega);
std::vector<double> expected_ap_loads(const Scenario& s, const UnitTimes& t,
                                      const StrategyProfile& prof);

// --- edge server loads (uses the profile's step counts, not the optimum) ---

std::vector<double> realized_es_loads(const Scenario& s, const StrategyProfile& prof,
                                      const ActivityState& omega);
std::vector<double> expected_es_loads(const Scenario& s, const StrategyProfile& prof);

// Expected delay of one UE given that it is active: own contribution at
// weight 1, every other UE at its activity probability.
double conditional_access_delay_s(const Scenario& s, const UnitTimes& t,
                                  const StrategyProfile& prof, int ue);
double conditional_compute_delay_s(const Scenario& s, const StrategyProfile& prof, int ue);

// Per-UE access/compute/total delays plus resource loads. With an activity
// state: realized mode (inactive UEs carry zero delay). Without: expected
// mode (unconditional, every contribution weighted by activity probability).
DelayBreakdown total_service_time(const Scenario& s, const UnitTimes& t,
                                  const StrategyProfile& prof, const ActivityState* omega);

// System objectives: sum of per-UE total delays.
double system_expected_total_s(const Scenario& s, const UnitTimes& t,
                               const StrategyProfile& prof);
double system_realized_total_s(const Scenario& s, const UnitTimes& t,
                               const StrategyProfile& prof, const ActivityState& omega);

}  // namespace jcaco
