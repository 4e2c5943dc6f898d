#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "helpers.hpp"
#include "jcaco/env.hpp"

using namespace jcaco;

TEST_CASE("joint probability multiplies per-UE Bernoulli terms") {
  Scenario s = test::make_scenario(2, 2, 2);  // both UEs at p = 0.5
  ActivityState omega;
  omega.active = {1, 1};
  CHECK(joint_probability(s, omega) == 0.25);
  omega.active = {1, 0};
  CHECK(joint_probability(s, omega) == 0.25);
  s.ues[0].active_prob = 0.2;
  s.ues[1].active_prob = 1.0;
  omega.active = {0, 1};
  CHECK(joint_probability(s, omega) == doctest::Approx(0.8).epsilon(1e-15));
  omega.active = {0, 0};  // impossible: UE 1 is always active
  CHECK(joint_probability(s, omega) == 0.0);
}

TEST_CASE("always-active UEs are active in every sampled slot") {
  Scenario s = test::make_scenario(3, 2, 2);
  s.ues[1].active_prob = 1.0;
  RngStream rng(5);
  for (int i = 0; i < 200; ++i) {
    ActivityState omega = sample_activity(s, rng);
    CHECK(omega.is_active(1));
  }
}

TEST_CASE("activity sample space enumerates all states and sums to one") {
  for (int n : {1, 3, 12}) {
    Scenario s = test::make_scenario(n, 2, 2);
    for (int i = 0; i < n; ++i) s.ues[static_cast<std::size_t>(i)].active_prob = 0.1 + 0.07 * i;
    int states = 0;
    double total = 0.0;
    for_each_activity_state(s, [&](const ActivityState& omega, double prob) {
      ++states;
      total += prob;
      CHECK(prob == joint_probability(s, omega));
    });
    CHECK(states == (1 << n));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("activity enumeration is guarded against huge spaces") {
  Scenario s = test::make_scenario(21, 2, 2);
  CHECK_THROWS_AS(for_each_activity_state(s, [](const ActivityState&, double) {}),
                  std::length_error);
}

TEST_CASE("sampled activity marginals match the probabilities") {
  Scenario s = test::make_scenario(3, 2, 2);
  s.ues[0].active_prob = 0.2;
  s.ues[1].active_prob = 0.5;
  s.ues[2].active_prob = 0.9;
  const int n = 100000;
  std::vector<int> hits(3, 0);
  RngStream rng(77);
  for (int i = 0; i < n; ++i) {
    ActivityState omega = sample_activity(s, rng);
    for (int u = 0; u < 3; ++u) hits[static_cast<std::size_t>(u)] += omega.is_active(u) ? 1 : 0;
  }
  for (int u = 0; u < 3; ++u) {
    double p = s.ues[static_cast<std::size_t>(u)].active_prob;
    double sd = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(hits[static_cast<std::size_t>(u)] / static_cast<double>(n) - p) <
          4.0 * sd + 1e-12);
  }
}

TEST_CASE("path loss gain is distance to the negative exponent") {
  Scenario s = test::make_scenario(1, 1, 1);
  s.physics.path_loss_exponent = 4.0;
  s.aps[0].position = {0.0, 0.0};
  std::vector<Vec2> pos{{100.0, 0.0}};
  ChannelRealization ch = deterministic_channel(s, pos);
  CHECK(ch.gain(0, 0) == doctest::Approx(1e-8).epsilon(1e-10));

  // Distance floor: sitting on the access point caps the gain at 1.
  pos[0] = {0.0, 0.0};
  CHECK(deterministic_channel(s, pos).gain(0, 0) == 1.0);
  pos[0] = {0.5, 0.0};
  CHECK(deterministic_channel(s, pos).gain(0, 0) == 1.0);

  s.physics.path_loss_exponent = 2.0;
  pos[0] = {0.0, 10.0};
  CHECK(deterministic_channel(s, pos).gain(0, 0) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("channel realization without fading is the pure path loss") {
  Scenario s = test::make_scenario(4, 3, 2);
  std::vector<Vec2> pos = ue_positions(s);
  RngStream rng(9);
  ChannelRealization with = realize_channel(s, pos, rng);
  ChannelRealization pure = deterministic_channel(s, pos);
  CHECK(with.gain == pure.gain);
  // No randomness is consumed on the fading-free path.
  RngStream fresh(9);
  CHECK(rng.next_u64() == fresh.next_u64());
}

TEST_CASE("rayleigh fading has unit mean around the path loss") {
  Scenario s = test::make_scenario(1, 1, 1);
  s.physics.rayleigh_enabled = true;
  std::vector<Vec2> pos = ue_positions(s);
  double base = deterministic_channel(s, pos).gain(0, 0);
  const int n = 100000;
  double sum = 0.0;
  RngStream rng(123);
  for (int i = 0; i < n; ++i) sum += realize_channel(s, pos, rng).gain(0, 0) / base;
  // Exp(1) factor: mean 1, sd 1.
  CHECK(std::abs(sum / n - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("mobility keeps UEs inside the area and is deterministic") {
  Scenario s = test::make_scenario(5, 2, 2);
  s.ues[0].position = {0.5, 0.5};  // near a corner so reflection triggers
  std::vector<Vec2> pos = ue_positions(s);
  RngStream a(31);
  RngStream b(31);
  std::vector<Vec2> moved = step_mobility(s, pos, 50.0, a);
  std::vector<Vec2> again = step_mobility(s, pos, 50.0, b);
  REQUIRE(moved.size() == pos.size());
  CHECK(moved == again);
  bool any_moved = false;
  for (std::size_t n = 0; n < moved.size(); ++n) {
    CHECK(moved[n].x >= 0.0);
    CHECK(moved[n].x <= s.physics.area_side_m);
    CHECK(moved[n].y >= 0.0);
    CHECK(moved[n].y <= s.physics.area_side_m);
    any_moved = any_moved || !(moved[n] == pos[n]);
  }
  CHECK(any_moved);
  // Zero radius is the identity.
  RngStream c(31);
  CHECK(step_mobility(s, pos, 0.0, c) == pos);
}

TEST_CASE("count_active counts set flags") {
  ActivityState omega;
  omega.active = {1, 0, 1, 1, 0};
  CHECK(omega.count_active() == 3);
}
