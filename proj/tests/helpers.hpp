#pragma once

// Hand-constructed scenarios for tests that need known parameter values
// instead of generator draws.

#include <vector>

#include "jcaco/scenario.hpp"

namespace jcaco::test {

// N UEs on the diagonal, M access points on the generator grid, K identical
// servers. Every field passes validate(); parameters are simple round values
// so tests can hand-compute delays.
inline Scenario make_scenario(int n_ues, int n_aps, int n_servers) {
  Scenario s;
  std::vector<Vec2> grid = ap_grid_positions(n_aps, s.physics.area_side_m);
  for (int m = 0; m < n_aps; ++m) s.aps.push_back({m, grid[static_cast<std::size_t>(m)], 5e6});
  for (int k = 0; k < n_servers; ++k) s.servers.push_back({k, 5.0, 0.25, 1.5});
  for (int n = 0; n < n_ues; ++n) {
    UserEquipment ue;
    ue.id = n;
    double step = s.physics.area_side_m / (n_ues + 1);
    ue.position = {step * (n + 1), step * (n + 1)};
    ue.data_size_bits = 5.0 * kBitsPerMegabyte;
    ue.active_prob = 0.5;
    ue.error_threshold = 0.1;
    ue.fitness.assign(static_cast<std::size_t>(n_servers), 0.1);
    ue.tx_power_watts.assign(static_cast<std::size_t>(n_aps), 0.2);
    s.ues.push_back(std::move(ue));
  }
  return s;
}

}  // namespace jcaco::test
