#include "jcaco/env.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jcaco {

int ActivityState::count_active() const {
  int c = 0;
  for (auto a : active) c += (a != 0);
  return c;
}

ActivityState sample_activity(const Scenario& s, RngStream& rng) {
  ActivityState omega;
  omega.active.resize(s.ues.size());
  for (std::size_t n = 0; n < s.ues.size(); ++n)
    omega.active[n] = rng.bernoulli(s.ues[n].active_prob) ? 1 : 0;
  return omega;
}

double joint_probability(const Scenario& s, const ActivityState& omega) {
  if (omega.active.size() != s.ues.size())
    throw std::invalid_argument("joint_probability: activity length != number of UEs");
  double p = 1.0;
  for (std::size_t n = 0; n < s.ues.size(); ++n) {
    double pn = s.ues[n].active_prob;
    p *= omega.active[n] ? pn : (1.0 - pn);
  }
  return p;
}

void for_each_activity_state(
    const Scenario& s, const std::function<void(const ActivityState&, double)>& visit) {
  const int n = s.num_ues();
  constexpr int kMaxEnumerableUes = 20;
  if (n > kMaxEnumerableUes)
    throw std::length_error("activity enumeration supports at most 20 UEs (2^N states); got " +
                            std::to_string(n));
  ActivityState omega;
  omega.active.assign(static_cast<std::size_t>(n), 0);
  const std::uint32_t states = 1u << n;
  for (std::uint32_t mask = 0; mask < states; ++mask) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      bool on = (mask >> i) & 1u;
      omega.active[static_cast<std::size_t>(i)] = on ? 1 : 0;
      double pn = s.ues[static_cast<std::size_t>(i)].active_prob;
      p *= on ? pn : (1.0 - pn);
    }
    visit(omega, p);
  }
}

namespace {

double pair_gain(const Vec2& a, const Vec2& b, double theta) {
  double dx = a.x - b.x;
  double dy = a.y - b.y;
  double d = std::sqrt(dx * dx + dy * dy);
  if (d < kDistanceFloorM) d = kDistanceFloorM;
  return std::pow(d, -theta);
}

}  // namespace

ChannelRealization deterministic_channel(const Scenario& s, std::span<const Vec2> pos) {
  if (pos.size() != s.ues.size())
    throw std::invalid_argument("deterministic_channel: positions length != number of UEs");
  ChannelRealization ch;
  ch.gain = Grid<double>(s.ues.size(), s.aps.size());
  for (std::size_t n = 0; n < s.ues.size(); ++n)
    for (std::size_t m = 0; m < s.aps.size(); ++m)
      ch.gain(n, m) = pair_gain(pos[n], s.aps[m].position, s.physics.path_loss_exponent);
  return ch;
}

ChannelRealization realize_channel(const Scenario& s, std::span<const Vec2> pos,
                                   RngStream& rng) {
  ChannelRealization ch = deterministic_channel(s, pos);
  if (s.physics.rayleigh_enabled) {
    // Rayleigh amplitude fading == unit-mean exponential power fading.
    for (std::size_t n = 0; n < s.ues.size(); ++n)
      for (std::size_t m = 0; m < s.aps.size(); ++m) ch.gain(n, m) *= rng.exponential(1.0);
  }
  return ch;
}

std::vector<Vec2> step_mobility(const Scenario& s, std::span<const Vec2> pos,
                                double step_radius_m, RngStream& rng) {
  if (pos.size() != s.ues.size())
    throw std::invalid_argument("step_mobility: positions length != number of UEs");
  if (step_radius_m < 0.0)
    throw std::invalid_argument("step_mobility: negative step radius");
  std::vector<Vec2> out(pos.begin(), pos.end());
  if (step_radius_m == 0.0) return out;
  const double side = s.physics.area_side_m;
  for (auto& p : out) {
    double angle = rng.uniform01() * 2.0 * std::numbers::pi;
    double radius = step_radius_m * std::sqrt(rng.uniform01());  // uniform over the disc
    p.x += radius * std::cos(angle);
    p.y += radius * std::sin(angle);
    // Reflect at the boundary; steps are bounded so a few folds suffice.
    while (p.x < 0.0 || p.x > side) p.x = p.x < 0.0 ? -p.x : 2.0 * side - p.x;
    while (p.y < 0.0 || p.y > side) p.y = p.y < 0.0 ? -p.y : 2.0 * side - p.y;
  }
  return out;
}

std::vector<Vec2> ue_positions(const Scenario& s) {
  std::vector<Vec2> out;
  out.reserve(s.ues.size());
  for (const auto& ue : s.ues) out.push_back(ue.position);
  return out;
}

}  // namespace jcaco
