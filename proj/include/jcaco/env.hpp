#pragma once

// Stochastic environment: Bernoulli per-slot UE activity, the finite sample
// space of activity states, channel gain realizations (path loss with optional
// Rayleigh fading), and random-walk mobility.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "jcaco/rng.hpp"
#include "jcaco/scenario.hpp"
#include "jcaco/util.hpp"

namespace jcaco {

struct ActivityState {
  std::vector<std::uint8_t> active;  // one flag per UE
  bool is_active(int ue) const { return active[static_cast<std::size_t>(ue)] != 0; }
  int count_active() const;
  bool operator==(const ActivityState&) const = default;
};

struct ChannelRealization {
  Grid<double> gain;  // h_nm, N x M
};

// One Bernoulli draw per UE with its own activity probability.
ActivityState sample_activity(const Scenario& s, RngStream& rng);

// Probability of the exact joint state: prod(active) p_n * prod(inactive) (1 - p_n).
double joint_probability(const Scenario& s, const ActivityState& omega);

// Visits every activity state with its probability. Guarded at N <= 20
// (throws std::length_error naming the bound) because the space has 2^N states.
void for_each_activity_state(
    const Scenario& s,
    const std::function<void(const ActivityState&, double)>& visit);

// Distance floor applied before path loss so gains stay finite when a UE sits
// on top of an access point.
inline constexpr double kDistanceFloorM = 1.0;

// Pure path-loss gains h_nm = max(d, floor)^(-theta) at the given UE positions.
ChannelRealization deterministic_channel(const Scenario& s, std::span<const Vec2> ue_positions);

// Path loss, multiplied by unit-mean exponential power fading per (UE, AP)
// when the scenario enables Rayleigh fading. Without fading this equals
// deterministic_channel and consumes no randomness.
ChannelRealization realize_channel(const Scenario& s, std::span<const Vec2> ue_positions,
                                   RngStream& rng);

// One random-walk step per UE: uniform direction, uniform radius in
// [0, step_radius_m], reflected at the area boundary. step_radius_m == 0
// returns the input unchanged.
std::vector<Vec2> step_mobility(const Scenario& s, std::span<const Vec2> ue_positions,
                                double step_radius_m, RngStream& rng);

// Initial UE positions as stored in the scenario.
std::vector<Vec2> ue_positions(const Scenario& s);

}  // namespace jcaco
