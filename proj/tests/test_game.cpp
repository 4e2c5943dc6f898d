#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "helpers.hpp"
#include "jcaco/game.hpp"
#include "jcaco/scenario.hpp"

using namespace jcaco;

namespace {

StrategyProfile opt_profile(const Scenario& s, const UnitTimes& t, std::vector<int> aps,
                            std::vector<int> ess) {
  StrategyProfile prof;
  prof.ap_choice = std::move(aps);
  prof.es_choice = std::move(ess);
  for (std::size_t n = 0; n < s.ues.size(); ++n)
    prof.steps.push_back(t.opt_steps(n, static_cast<std::size_t>(prof.es_choice[n])));
  return prof;
}

// Oracle: evaluate a UE's payoff on a candidate (ap, es) pair by rebuilding
// the profile and calling the latency layer directly.
double oracle_payoff(const GameView& view, StrategyProfile prof, int ue, int ap, int es) {
  const UnitTimes& t = *view.times;
  auto u = static_cast<std::size_t>(ue);
  prof.ap_choice[u] = ap;
  prof.es_choice[u] = es;
  prof.steps[u] = t.opt_steps(u, static_cast<std::size_t>(es));
  return payoff(view, prof, ue);
}

// Oracle NE check for kind == total: enumerate every (ap, es) alternative.
bool oracle_is_ne(const GameView& view, const StrategyProfile& prof, double tol) {
  const Scenario& s = *view.scenario;
  for (int n = 0; n < s.num_ues(); ++n) {
    if (view.mode == InfoMode::complete && !view.activity->is_active(n)) continue;
    auto u = static_cast<std::size_t>(n);
    double cur = payoff(view, prof, n);
    for (int m = 0; m < s.num_aps(); ++m)
      for (int k = 0; k < s.num_servers(); ++k) {
        if (m == prof.ap_choice[u] && k == prof.es_choice[u]) continue;
        if (cur - oracle_payoff(view, prof, n, m, k) > tol) return false;
      }
  }
  return true;
}

}  // namespace

TEST_CASE("potential delta sign is dominated by the largest load") {
  const double big = 1000.0;  // log2 of the default base
  std::vector<double> before{10.0, 0.2};
  std::vector<double> after{9.0, 3.2};
  // The max load drops from 10.0 to 9.0, so the big-base potential drops even
  // though the load sum grows.
  CHECK(potential_delta_sign(before, after, big) == -1);
  CHECK(potential_delta_sign(after, before, big) == 1);
  // A sum-dominated small base reads the same move as an increase: the
  // order-sensitivity is what the huge base buys.
  CHECK(potential_delta_sign(before, after, 0.01) == 1);
}

TEST_CASE("potential delta sign classifies unchanged loads as zero") {
  std::vector<double> loads{5.0, 3.0, 1.0};
  CHECK(potential_delta_sign(loads, loads, 1000.0) == 0);
  // Differences at the granularity scale are still resolved.
  CHECK(potential_delta_sign({{1.0}}, {{1.001}}, 1000.0) == 1);
  CHECK(potential_delta_sign({{1.001}}, {{1.0}}, 1000.0) == -1);
  CHECK_THROWS_AS(potential_delta_sign(loads, loads, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(potential_delta_sign({}, {}, 1000.0), std::invalid_argument);
}

TEST_CASE("potential terms are log2(base) times the view's loads") {
  Scenario s = test::make_scenario(3, 2, 2);
  UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  StrategyProfile prof = opt_profile(s, t, {0, 1, 0}, {0, 1, 1});

  GameView acc = make_stochastic_view(s, t, PayoffKind::access);
  PotentialValue pv = potential(acc, prof);
  std::vector<double> loads = expected_ap_loads(s, t, prof);
  REQUIRE(pv.log2_terms.size() == loads.size());
  for (std::size_t m = 0; m < loads.size(); ++m)
    CHECK(pv.log2_terms[m] == doctest::Approx(1000.0 * loads[m]).epsilon(1e-12));
  CHECK(pv.log2_value >= *std::max_element(pv.log2_terms.begin(), pv.log2_terms.end()));

  ActivityState omega;
  omega.active = {1, 0, 1};
  GameView comp = make_complete_view(s, t, PayoffKind::compute, omega);
  PotentialValue pc = potential(comp, prof);
  std::vector<double> es_loads = realized_es_loads(s, prof, omega);
  for (std::size_t k = 0; k < es_loads.size(); ++k)
    CHECK(pc.log2_terms[k] == doctest::Approx(1000.0 * es_loads[k]).epsilon(1e-12));

  GameView total = make_stochastic_view(s, t, PayoffKind::total);
  CHECK_THROWS_AS(potential(total, prof), std::invalid_argument);
}

TEST_CASE("sign property holds on random small instances") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.num_ues = 5;
    cfg.num_aps = 3;
    cfg.num_servers = 3;
    Scenario s = generate_scenario(cfg);
    UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));

    ActivityState omega;
    omega.active = {1, 1, 0, 1, 1};
    for (PayoffKind kind : {PayoffKind::access, PayoffKind::compute}) {
      GameView stoch = make_stochastic_view(s, t, kind, StochasticBasis::expected_load);
      SignPropertyReport r = check_sign_property(stoch, 2000, seed);
      CHECK(r.ok());
      CHECK(r.evaluated > 0);
      CHECK(r.attempted >= r.evaluated);

      GameView comp = make_complete_view(s, t, kind, omega);
      SignPropertyReport rc = check_sign_property(comp, 2000, seed);
      CHECK(rc.ok());
      CHECK(rc.evaluated > 0);
    }
  }
}

TEST_CASE("sign property rejects the joint kind") {
  Scenario s = test::make_scenario(2, 2, 2);
  UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  GameView total = make_stochastic_view(s, t, PayoffKind::total);
  CHECK_THROWS_AS(check_sign_property(total, 10, 1), std::invalid_argument);
}

TEST_CASE("equilibrium checker agrees with profile enumeration") {
  GenConfig cfg;
  cfg.seed = 21;
  cfg.num_ues = 2;
  cfg.num_aps = 2;
  cfg.num_servers = 2;
  Scenario s = generate_scenario(cfg);
  UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));

  ActivityState omega;
  omega.active = {1, 1};
  std::vector<GameView> views{
      make_stochastic_view(s, t, PayoffKind::total, StochasticBasis::conditional_active),
      make_stochastic_view(s, t, PayoffKind::total, StochasticBasis::expected_load),
      make_complete_view(s, t, PayoffKind::total, omega),
  };
  const double tol = 1e-9;
  int ne_found = 0;
  for (const GameView& view : views) {
    for (int a0 = 0; a0 < 2; ++a0)
      for (int a1 = 0; a1 < 2; ++a1)
        for (int e0 = 0; e0 < 2; ++e0)
          for (int e1 = 0; e1 < 2; ++e1) {
            StrategyProfile prof = opt_profile(s, t, {a0, a1}, {e0, e1});
            NeReport rep = is_nash_equilibrium(view, prof, tol);
            bool want = oracle_is_ne(view, prof, tol);
            CHECK(rep.is_ne == want);
            ne_found += rep.is_ne ? 1 : 0;
          }
  }
  CHECK(ne_found > 0);  // finite potential games have at least one pure NE
}

TEST_CASE("a single UE is in equilibrium exactly at its argmin") {
  GenConfig cfg;
  cfg.seed = 33;
  cfg.num_ues = 1;
  cfg.num_aps = 3;
  cfg.num_servers = 3;
  Scenario s = generate_scenario(cfg);
  UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  GameView view = make_stochastic_view(s, t, PayoffKind::total);

  double best = 0.0;
  int best_m = -1, best_k = -1;
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k) {
      StrategyProfile prof = opt_profile(s, t, {m}, {k});
      double cost = payoff(view, prof, 0);
      if (best_m < 0 || cost < best) {
        best = cost;
        best_m = m;
        best_k = k;
      }
    }
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k) {
      StrategyProfile prof = opt_profile(s, t, {m}, {k});
      NeReport rep = is_nash_equilibrium(view, prof, 1e-9);
      CHECK(rep.is_ne == (m == best_m && k == best_k));
    }
}

TEST_CASE("a dominated choice is flagged with its improving deviation") {
  Scenario s = test::make_scenario(2, 2, 2);
  // AP 1 is effectively unusable for everyone: starve its bandwidth.
  s.aps[1].bandwidth_hz = 1e3;
  UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  StrategyProfile prof = opt_profile(s, t, {1, 0}, {0, 1});
  GameView view = make_stochastic_view(s, t, PayoffKind::access);
  NeReport rep = is_nash_equilibrium(view, prof, 1e-6);
  CHECK_FALSE(rep.is_ne);
  REQUIRE_FALSE(rep.best_deviation.empty());
  const Deviation* dev = nullptr;
  for (const Deviation& d : rep.best_deviation)
    if (d.ue == 0) dev = &d;
  REQUIRE(dev != nullptr);
  CHECK(dev->ap == 0);
  CHECK(dev->improvement > 0.0);
  CHECK(rep.max_improvement >= dev->improvement);

  // The reported improvement matches the payoff difference.
  StrategyProfile moved = prof;
  moved.ap_choice[0] = 0;
  CHECK(dev->improvement ==
        doctest::Approx(payoff(view, prof, 0) - payoff(view, moved, 0)).epsilon(1e-12));
}

TEST_CASE("complete views demand a matching activity state") {
  Scenario s = test::make_scenario(3, 2, 2);
  UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  ActivityState wrong;
  wrong.active = {1, 0};  // 2 flags for 3 UEs
  CHECK_THROWS_AS(make_complete_view(s, t, PayoffKind::access, wrong), std::invalid_argument);

  ActivityState omega;
  omega.active = {1, 0, 1};
  GameView view = make_complete_view(s, t, PayoffKind::total, omega);
  StrategyProfile prof = opt_profile(s, t, {0, 1, 0}, {0, 1, 1});
  CHECK_THROWS_AS(payoff(view, prof, 1), std::domain_error);  // inactive this slot
  CHECK(payoff(view, prof, 0) > 0.0);
}

TEST_CASE("always-active UEs collapse the two stochastic bases") {
  Scenario s = test::make_scenario(3, 2, 2);
  for (auto& ue : s.ues) ue.active_prob = 1.0;
  UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  StrategyProfile prof = opt_profile(s, t, {0, 1, 0}, {1, 0, 1});
  GameView cond = make_stochastic_view(s, t, PayoffKind::total,
                                       StochasticBasis::conditional_active);
  GameView expd = make_stochastic_view(s, t, PayoffKind::total, StochasticBasis::expected_load);
  for (int n = 0; n < 3; ++n)
    CHECK(payoff(cond, prof, n) == doctest::Approx(payoff(expd, prof, n)).epsilon(1e-15));
}

TEST_CASE("stochastic bases diverge for rarely active UEs") {
  Scenario s = test::make_scenario(2, 2, 2);
  s.ues[0].active_prob = 0.1;
  UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  StrategyProfile prof = opt_profile(s, t, {0, 0}, {0, 0});
  GameView cond = make_stochastic_view(s, t, PayoffKind::access,
                                       StochasticBasis::conditional_active);
  GameView expd = make_stochastic_view(s, t, PayoffKind::access, StochasticBasis::expected_load);
  // Conditional: own term at weight 1. Expected: own term at weight 0.1.
  CHECK(payoff(cond, prof, 0) - payoff(expd, prof, 0) ==
        doctest::Approx(0.9 * t.tx_s(0, 0)).epsilon(1e-12));
}
