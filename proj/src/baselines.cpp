#include "jcaco/baselines.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "jcaco/rng.hpp"

namespace jcaco {
namespace {

StrategyProfile random_profile(const Scenario& s, const UnitTimes& t, std::uint64_t seed) {
  StrategyProfile prof;
  const std::size_t n_ues = s.ues.size();
  prof.ap_choice.resize(n_ues);
  prof.es_choice.resize(n_ues);
  prof.steps.resize(n_ues);
  RngStream rng = RngStream::from(seed, {stream_label::kBaseline});
  for (std::size_t n = 0; n < n_ues; ++n) {
    prof.ap_choice[n] = static_cast<int>(rng.uniform_below(s.aps.size()));
    auto k = rng.uniform_below(s.servers.size());
    prof.es_choice[n] = static_cast<int>(k);
    prof.steps[n] = t.opt_steps(n, k);
  }
  return prof;
}

}  // namespace

BestResponseResult run_best_response(const Scenario& s, const UnitTimes& t,
                                     const GameView& view, const BaselineConfig& cfg) {
  if (cfg.max_rounds < 1)
    throw std::invalid_argument("run_best_response: max_rounds must be at least 1");
  GameView v = view;
  v.scenario = &s;
  v.times = &t;
  // Only the expected-load payoff carries the finite-improvement guarantee in
  // the stochastic game, so the dynamic pins it regardless of the caller's
  // reporting basis.
  if (v.mode == InfoMode::stochastic) v.basis = StochasticBasis::expected_load;

  BestResponseResult result;
  result.profile = random_profile(s, t, cfg.seed);
  StrategyProfile& prof = result.profile;
  const std::size_t n_ues = s.ues.size();
  const bool move_ap = v.kind != PayoffKind::compute;
  const bool move_es = v.kind != PayoffKind::access;

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    result.rounds = round;
    bool moved = false;
    for (std::size_t n = 0; n < n_ues; ++n) {
      if (v.mode == InfoMode::complete && !v.activity->is_active(static_cast<int>(n)))
        continue;
      const int cur_ap = prof.ap_choice[n];
      const int cur_es = prof.es_choice[n];
      const int cur_steps = prof.steps[n];
      const double cur_cost = payoff(v, prof, static_cast<int>(n));

      double best_cost = std::numeric_limits<double>::infinity();
      int best_ap = cur_ap, best_es = cur_es, best_steps = cur_steps;
      const std::size_t ap_count = move_ap ? s.aps.size() : 1;
      const std::size_t es_count = move_es ? s.servers.size() : 1;
      for (std::size_t mi = 0; mi < ap_count; ++mi) {
        int m = move_ap ? static_cast<int>(mi) : cur_ap;
        for (std::size_t ki = 0; ki < es_count; ++ki) {
          int k = move_es ? static_cast<int>(ki) : cur_es;
          int d = move_es ? t.opt_steps(n, static_cast<std::size_t>(k)) : cur_steps;
          prof.ap_choice[n] = m;
          prof.es_choice[n] = k;
          prof.steps[n] = d;
          double cost = payoff(v, prof, static_cast<int>(n));
          if (cost < best_cost) {
            best_cost = cost;
            best_ap = m;
            best_es = k;
            best_steps = d;
          }
        }
      }
      if (best_cost < cur_cost - cfg.tolerance) {
        prof.ap_choice[n] = best_ap;
        prof.es_choice[n] = best_es;
        prof.steps[n] = best_steps;
        result.moves += 1;
        result.move_log.push_back(MoveRecord{static_cast<int>(n), cur_ap, best_ap, cur_es,
                                             best_es, cur_steps, best_steps});
        moved = true;
      } else {
        prof.ap_choice[n] = cur_ap;
        prof.es_choice[n] = cur_es;
        prof.steps[n] = cur_steps;
      }
    }
    if (!moved) {
      result.converged = true;
      break;
    }
  }
  return result;
}

MxfpResult run_mxfp(const Scenario& s, const UnitTimes& t, const BaselineConfig& cfg) {
  if (cfg.max_rounds < 1)
    throw std::invalid_argument("run_mxfp: max_rounds must be at least 1");
  const std::size_t n_ues = s.ues.size();
  const std::size_t n_aps = s.aps.size();
  const std::size_t n_es = s.servers.size();

  Grid<int> ap_counts(n_ues, n_aps, 0);
  Grid<int> es_counts(n_ues, n_es, 0);
  // Played-action frequencies, tracked only for the stabilization test. The
  // opponent model itself stays uniform: each UE assumes every other UE mixes
  // uniformly over resources and never revises that belief from observed play.
  Grid<double> ap_freq(n_ues, n_aps, 1.0 / static_cast<double>(n_aps));
  Grid<double> es_freq(n_ues, n_es, 1.0 / static_cast<double>(n_es));
  const double ap_belief = 1.0 / static_cast<double>(n_aps);
  const double es_belief = 1.0 / static_cast<double>(n_es);

  MxfpResult result;
  result.profile.ap_choice.assign(n_ues, 0);
  result.profile.es_choice.assign(n_ues, 0);
  result.profile.steps.assign(n_ues, s.game.min_inference_steps);

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    result.rounds = round;
    // Simultaneous move: everyone best-responds to the uniform opponent
    // model. Cost of a resource is the UE's own unit time plus every
    // opponent's activity-weighted predicted contribution.
    for (std::size_t n = 0; n < n_ues; ++n) {
      double best_cost = std::numeric_limits<double>::infinity();
      int best_m = 0;
      for (std::size_t m = 0; m < n_aps; ++m) {
        double cost = t.tx_s(n, m);
        for (std::size_t o = 0; o < n_ues; ++o) {
          if (o == n) continue;
          cost += s.ues[o].active_prob * ap_belief * t.tx_s(o, m);
        }
        if (cost < best_cost) {
          best_cost = cost;
          best_m = static_cast<int>(m);
        }
      }
      result.profile.ap_choice[n] = best_m;

      best_cost = std::numeric_limits<double>::infinity();
      int best_k = 0;
      for (std::size_t k = 0; k < n_es; ++k) {
        double cost = t.opt_compute_s(n, k);
        for (std::size_t o = 0; o < n_ues; ++o) {
          if (o == n) continue;
          cost += s.ues[o].active_prob * es_belief * t.opt_compute_s(o, k);
        }
        if (cost < best_cost) {
          best_cost = cost;
          best_k = static_cast<int>(k);
        }
      }
      result.profile.es_choice[n] = best_k;
      result.profile.steps[n] = t.opt_steps(n, static_cast<std::size_t>(best_k));
    }

    double max_change = 0.0;
    for (std::size_t n = 0; n < n_ues; ++n) {
      ap_counts(n, static_cast<std::size_t>(result.profile.ap_choice[n])) += 1;
      es_counts(n, static_cast<std::size_t>(result.profile.es_choice[n])) += 1;
      for (std::size_t m = 0; m < n_aps; ++m) {
        double f = static_cast<double>(ap_counts(n, m)) / static_cast<double>(round);
        max_change = std::max(max_change, std::abs(f - ap_freq(n, m)));
        ap_freq(n, m) = f;
      }
      for (std::size_t k = 0; k < n_es; ++k) {
        double f = static_cast<double>(es_counts(n, k)) / static_cast<double>(round);
        max_change = std::max(max_change, std::abs(f - es_freq(n, k)));
        es_freq(n, k) = f;
      }
    }
    // Round 1 replaces the uniform prior wholesale; never call that converged.
    if (round > 1 && max_change < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

StrategyProfile run_selfish(const Scenario& s, const UnitTimes& t) {
  const std::size_t n_ues = s.ues.size();
  StrategyProfile prof;
  prof.ap_choice.resize(n_ues);
  prof.es_choice.resize(n_ues);
  prof.steps.resize(n_ues);
  std::size_t fastest = 0;
  for (std::size_t k = 1; k < s.servers.size(); ++k)
    if (s.servers[k].flops_per_sec > s.servers[fastest].flops_per_sec) fastest = k;
  for (std::size_t n = 0; n < n_ues; ++n) {
    std::size_t nearest = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < s.aps.size(); ++m) {
      double dx = s.ues[n].position.x - s.aps[m].position.x;
      double dy = s.ues[n].position.y - s.aps[m].position.y;
      double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        nearest = m;
      }
    }
    prof.ap_choice[n] = static_cast<int>(nearest);
    prof.es_choice[n] = static_cast<int>(fastest);
    prof.steps[n] = t.opt_steps(n, fastest);
  }
  return prof;
}

StrategyProfile run_raro(const Scenario& s, const UnitTimes& t, std::uint64_t seed) {
  return random_profile(s, t, seed);
}

}  // namespace jcaco
