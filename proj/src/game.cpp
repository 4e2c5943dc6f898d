#include "jcaco/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jcaco/rng.hpp"

namespace jcaco {
namespace {

void require_view(const GameView& view) {
  if (view.scenario == nullptr || view.times == nullptr)
    throw std::invalid_argument("game view: scenario and times must be set");
  if (view.mode == InfoMode::complete) {
    if (!view.activity.has_value())
      throw std::invalid_argument("game view: complete mode needs an activity state");
    if (view.activity->active.size() != view.scenario->ues.size())
      throw std::invalid_argument("game view: activity length != number of UEs");
  }
}

void require_profile(const Scenario& s, const StrategyProfile& prof) {
  const auto n = s.ues.size();
  if (prof.ap_choice.size() != n || prof.es_choice.size() != n || prof.steps.size() != n)
    throw std::invalid_argument("strategy profile: vector lengths != number of UEs");
}

std::vector<double> view_ap_loads(const GameView& view, const StrategyProfile& prof) {
  if (view.mode == InfoMode::complete)
    return realized_ap_loads(*view.scenario, *view.times, prof, *view.activity);
  return expected_ap_loads(*view.scenario, *view.times, prof);
}

std::vector<double> view_es_loads(const GameView& view, const StrategyProfile& prof) {
  if (view.mode == InfoMode::complete)
    return realized_es_loads(*view.scenario, prof, *view.activity);
  return expected_es_loads(*view.scenario, prof);
}

}  // namespace

GameView make_complete_view(const Scenario& s, const UnitTimes& t, PayoffKind kind,
                            ActivityState omega) {
  GameView v;
  v.scenario = &s;
  v.times = &t;
  v.mode = InfoMode::complete;
  v.kind = kind;
  v.activity = std::move(omega);
  require_view(v);  // fail at construction, not first use
  return v;
}

GameView make_stochastic_view(const Scenario& s, const UnitTimes& t, PayoffKind kind,
                              StochasticBasis basis) {
  GameView v;
  v.scenario = &s;
  v.times = &t;
  v.mode = InfoMode::stochastic;
  v.kind = kind;
  v.basis = basis;
  return v;
}

double payoff(const GameView& view, const StrategyProfile& prof, int ue) {
  require_view(view);
  const Scenario& s = *view.scenario;
  require_profile(s, prof);
  if (ue < 0 || ue >= s.num_ues()) throw std::invalid_argument("payoff: UE index out of range");

  if (view.mode == InfoMode::complete) {
    if (!view.activity->is_active(ue))
      throw std::domain_error("payoff: UE " + std::to_string(ue) +
                              " is inactive in this slot");
    double acc = 0.0, comp = 0.0;
    if (view.kind != PayoffKind::compute) {
      auto loads = realized_ap_loads(s, *view.times, prof, *view.activity);
      acc = loads[static_cast<std::size_t>(prof.ap_choice[static_cast<std::size_t>(ue)])];
    }
    if (view.kind != PayoffKind::access) {
      auto loads = realized_es_loads(s, prof, *view.activity);
      comp = loads[static_cast<std::size_t>(prof.es_choice[static_cast<std::size_t>(ue)])];
    }
    return acc + comp;
  }

  if (view.basis == StochasticBasis::conditional_active) {
    double acc = view.kind != PayoffKind::compute
                     ? conditional_access_delay_s(s, *view.times, prof, ue)
                     : 0.0;
    double comp = view.kind != PayoffKind::access
                      ? conditional_compute_delay_s(s, prof, ue)
                      : 0.0;
    return acc + comp;
  }

  double acc = 0.0, comp = 0.0;
  if (view.kind != PayoffKind::compute) {
    auto loads = expected_ap_loads(s, *view.times, prof);
    acc = loads[static_cast<std::size_t>(prof.ap_choice[static_cast<std::size_t>(ue)])];
  }
  if (view.kind != PayoffKind::access) {
    auto loads = expected_es_loads(s, prof);
    comp = loads[static_cast<std::size_t>(prof.es_choice[static_cast<std::size_t>(ue)])];
  }
  return acc + comp;
}

PotentialValue potential(const GameView& view, const StrategyProfile& prof) {
  require_view(view);
  require_profile(*view.scenario, prof);
  if (view.kind == PayoffKind::total)
    throw std::invalid_argument("potential: defined per subgame, not for the joint kind");
  const bool access = view.kind == PayoffKind::access;
  double base = access ? view.scenario->game.potential_base_comm
                       : view.scenario->game.potential_base_comp;
  double log2_base = std::log2(base);
  std::vector<double> loads = access ? view_ap_loads(view, prof) : view_es_loads(view, prof);
  PotentialValue pv;
  pv.log2_terms.reserve(loads.size());
  for (double load : loads) pv.log2_terms.push_back(log2_base * load);
  pv.log2_value = log2_sum_exp2(pv.log2_terms);
  return pv;
}

int potential_delta_sign(std::span<const double> loads_before,
                         std::span<const double> loads_after, double log2_base) {
  if (!(log2_base > 0.0))
    throw std::invalid_argument("potential_delta_sign: log2_base must be positive");
  double e_max = -std::numeric_limits<double>::infinity();
  for (double l : loads_before) e_max = std::max(e_max, log2_base * l);
  for (double l : loads_after) e_max = std::max(e_max, log2_base * l);
  if (!std::isfinite(e_max))
    throw std::invalid_argument("potential_delta_sign: no terms");
  double sum = 0.0;
  for (double l : loads_after) sum += std::exp2(log2_base * l - e_max);
  for (double l : loads_before) sum -= std::exp2(log2_base * l - e_max);
  // After factoring, every term is at most 1; residues below 1e-12 are
  // indistinguishable from rounding noise and classify as "no change".
  constexpr double kZero = 1e-12;
  if (sum > kZero) return 1;
  if (sum < -kZero) return -1;
  return 0;
}

namespace {

struct ComputeDeviation {
  int new_es = 0;
  int new_steps = 0;
  const char* label = "";
};

int draw_step_count(RngStream& rng, int lo, int hi) { return rng.uniform_int(lo, hi); }

}  // namespace

SignPropertyReport check_sign_property(const GameView& view, std::uint64_t trials,
                                       std::uint64_t seed) {
  require_view(view);
  if (view.kind == PayoffKind::total)
    throw std::invalid_argument("check_sign_property: pick the access or compute subgame");
  const Scenario& s = *view.scenario;
  const UnitTimes& t = *view.times;
  const int n_ues = s.num_ues();
  const int n_aps = s.num_aps();
  const int n_es = s.num_servers();
  const bool access = view.kind == PayoffKind::access;
  const bool complete = view.mode == InfoMode::complete;

  if (access && n_aps < 2)
    throw std::invalid_argument("check_sign_property: access game needs at least 2 APs");

  std::vector<int> players;
  for (int n = 0; n < n_ues; ++n)
    if (!complete || view.activity->is_active(n)) players.push_back(n);
  if (players.empty())
    throw std::invalid_argument("check_sign_property: no active UE to deviate");

  const double gran = access ? s.game.comm_time_granularity_s : s.game.comp_time_granularity_s;
  const double log2_base = std::log2(access ? s.game.potential_base_comm
                                            : s.game.potential_base_comp);
  const int min_d = s.game.min_inference_steps;

  SignPropertyReport report;
  const std::uint64_t max_attempts = trials * 50 + 1000;
  for (std::uint64_t trial = 0; report.evaluated < trials && report.attempted < max_attempts;
       ++trial) {
    RngStream prof_rng = RngStream::from(seed, {stream_label::kTrialProfile, trial});
    StrategyProfile prof;
    prof.ap_choice.resize(static_cast<std::size_t>(n_ues));
    prof.es_choice.resize(static_cast<std::size_t>(n_ues));
    prof.steps.resize(static_cast<std::size_t>(n_ues));
    for (int n = 0; n < n_ues; ++n) {
      prof.ap_choice[static_cast<std::size_t>(n)] =
          static_cast<int>(prof_rng.uniform_below(static_cast<std::uint64_t>(n_aps)));
      int k = static_cast<int>(prof_rng.uniform_below(static_cast<std::uint64_t>(n_es)));
      prof.es_choice[static_cast<std::size_t>(n)] = k;
      int hi = std::max(min_d, 2 * t.opt_steps(static_cast<std::size_t>(n),
                                               static_cast<std::size_t>(k)));
      prof.steps[static_cast<std::size_t>(n)] = draw_step_count(prof_rng, min_d, hi);
    }

    RngStream dev_rng = RngStream::from(seed, {stream_label::kTrialDeviation, trial});
    int ue = players[dev_rng.uniform_below(players.size())];
    auto u = static_cast<std::size_t>(ue);
    report.attempted++;

    double payoff_delta = 0.0;
    int pot_sign = 0;
    std::string description;

    if (access) {
      int old_ap = prof.ap_choice[u];
      int new_ap = static_cast<int>(dev_rng.uniform_below(static_cast<std::uint64_t>(n_aps - 1)));
      if (new_ap >= old_ap) ++new_ap;
      auto loads = view_ap_loads(view, prof);
      double weight = complete ? 1.0 : s.ues[u].active_prob;
      double own_old = weight * t.tx_s(u, static_cast<std::size_t>(old_ap));
      double own_new = weight * t.tx_s(u, static_cast<std::size_t>(new_ap));
      double l_old = loads[static_cast<std::size_t>(old_ap)];
      double l_new = loads[static_cast<std::size_t>(new_ap)];
      payoff_delta = (l_new + own_new) - l_old;
      const double before[] = {l_old, l_new};
      const double after[] = {l_old - own_old, l_new + own_new};
      if (std::abs(payoff_delta) < gran) continue;
      pot_sign = potential_delta_sign(before, after, log2_base);
      description = "AP " + std::to_string(old_ap) + " -> " + std::to_string(new_ap);
    } else {
      int old_es = prof.es_choice[u];
      int old_d = prof.steps[u];
      ComputeDeviation dev;
      // The three deviation cases: server switch, step change, joint switch.
      int c = n_es >= 2 ? static_cast<int>(dev_rng.uniform_below(3)) : 1;
      if (c == 0) {
        dev.new_es = static_cast<int>(dev_rng.uniform_below(static_cast<std::uint64_t>(n_es - 1)));
        if (dev.new_es >= old_es) ++dev.new_es;
        dev.new_steps = old_d;
        dev.label = "server switch";
      } else if (c == 1) {
        int hi = std::max(min_d, 2 * t.opt_steps(u, static_cast<std::size_t>(old_es)));
        if (hi == min_d && old_d == min_d) continue;  // no alternative step count
        int d = draw_step_count(dev_rng, min_d, hi - 1);
        if (d >= old_d) ++d;
        dev.new_es = old_es;
        dev.new_steps = d;
        dev.label = "step change";
      } else {
        dev.new_es = static_cast<int>(dev_rng.uniform_below(static_cast<std::uint64_t>(n_es - 1)));
        if (dev.new_es >= old_es) ++dev.new_es;
        int hi = std::max(min_d, 2 * t.opt_steps(u, static_cast<std::size_t>(dev.new_es)));
        dev.new_steps = draw_step_count(dev_rng, min_d, hi);
        dev.label = "joint switch";
      }

      auto loads = view_es_loads(view, prof);
      double weight = complete ? 1.0 : s.ues[u].active_prob;
      double own_old =
          weight * unit_compute_time_s(s.servers[static_cast<std::size_t>(old_es)], old_d);
      double own_new = weight * unit_compute_time_s(
                                    s.servers[static_cast<std::size_t>(dev.new_es)],
                                    dev.new_steps);
      if (dev.new_es == old_es) {
        double l = loads[static_cast<std::size_t>(old_es)];
        payoff_delta = own_new - own_old;
        const double before[] = {l};
        const double after[] = {l - own_old + own_new};
        if (std::abs(payoff_delta) < gran) continue;
        pot_sign = potential_delta_sign(before, after, log2_base);
      } else {
        double l_old = loads[static_cast<std::size_t>(old_es)];
        double l_new = loads[static_cast<std::size_t>(dev.new_es)];
        payoff_delta = (l_new + own_new) - l_old;
        const double before[] = {l_old, l_new};
        const double after[] = {l_old - own_old, l_new + own_new};
        if (std::abs(payoff_delta) < gran) continue;
        pot_sign = potential_delta_sign(before, after, log2_base);
      }
      description = std::string(dev.label) + ": ES " + std::to_string(old_es) + "/" +
                    std::to_string(old_d) + " -> " + std::to_string(dev.new_es) + "/" +
                    std::to_string(dev.new_steps);
    }

    report.evaluated++;
    int pay_sign = payoff_delta > 0.0 ? 1 : -1;
    if (pay_sign != pot_sign) {
      SignViolation v;
      v.trial = trial;
      v.ue = ue;
      v.deviation = description;
      v.payoff_delta = payoff_delta;
      v.potential_sign = pot_sign;
      report.violations.push_back(std::move(v));
    }
  }
  return report;
}

NeReport is_nash_equilibrium(const GameView& view, const StrategyProfile& prof,
                             double tolerance) {
  require_view(view);
  const Scenario& s = *view.scenario;
  const UnitTimes& t = *view.times;
  require_profile(s, prof);
  if (tolerance < 0.0) throw std::invalid_argument("is_nash_equilibrium: negative tolerance");

  const bool complete = view.mode == InfoMode::complete;
  const bool conditional =
      !complete && view.basis == StochasticBasis::conditional_active;
  const int n_aps = s.num_aps();
  const int n_es = s.num_servers();

  std::vector<double> ap_loads, es_loads;
  if (view.kind != PayoffKind::compute) ap_loads = view_ap_loads(view, prof);
  if (view.kind != PayoffKind::access) es_loads = view_es_loads(view, prof);

  NeReport report;
  report.is_ne = true;
  for (int ue = 0; ue < s.num_ues(); ++ue) {
    if (complete && !view.activity->is_active(ue)) continue;  // not a player this slot
    auto u = static_cast<std::size_t>(ue);
    // Own-contribution weight inside loads: 1 when realized-active or
    // conditional; the activity probability in the expected-load basis.
    double w = complete || conditional ? 1.0 : s.ues[u].active_prob;
    double p = complete ? 1.0 : s.ues[u].active_prob;

    // Access side: cost of each AP choice, others fixed.
    double cur_acc = 0.0;
    std::vector<double> cand_acc;
    if (view.kind != PayoffKind::compute) {
      int cur_m = prof.ap_choice[u];
      cand_acc.resize(static_cast<std::size_t>(n_aps));
      for (int m = 0; m < n_aps; ++m) {
        double own = w * t.tx_s(u, static_cast<std::size_t>(m));
        double others = ap_loads[static_cast<std::size_t>(m)];
        if (m == cur_m) others -= p * t.tx_s(u, static_cast<std::size_t>(cur_m));
        cand_acc[static_cast<std::size_t>(m)] = others + own;
      }
      double own_cur = p * t.tx_s(u, static_cast<std::size_t>(cur_m));
      cur_acc = ap_loads[static_cast<std::size_t>(cur_m)] - own_cur +
                w * t.tx_s(u, static_cast<std::size_t>(cur_m));
    }

    // Compute side: cost of each server at its optimal step count; the
    // current payoff uses the profile's actual step count.
    double cur_comp = 0.0;
    std::vector<double> cand_comp;
    if (view.kind != PayoffKind::access) {
      int cur_k = prof.es_choice[u];
      double own_cur_profile =
          unit_compute_time_s(s.servers[static_cast<std::size_t>(cur_k)], prof.steps[u]);
      cand_comp.resize(static_cast<std::size_t>(n_es));
      for (int k = 0; k < n_es; ++k) {
        double own = w * t.opt_compute_s(u, static_cast<std::size_t>(k));
        double others = es_loads[static_cast<std::size_t>(k)];
        if (k == cur_k) others -= p * own_cur_profile;
        cand_comp[static_cast<std::size_t>(k)] = others + own;
      }
      cur_comp = es_loads[static_cast<std::size_t>(cur_k)] - p * own_cur_profile +
                 w * own_cur_profile;
    }

    double current = cur_acc + cur_comp;
    Deviation best;
    best.ue = ue;
    double best_cost = current;
    if (view.kind == PayoffKind::access) {
      for (int m = 0; m < n_aps; ++m)
        if (cand_acc[static_cast<std::size_t>(m)] < best_cost) {
          best_cost = cand_acc[static_cast<std::size_t>(m)];
          best.ap = m;
        }
    } else if (view.kind == PayoffKind::compute) {
      for (int k = 0; k < n_es; ++k)
        if (cand_comp[static_cast<std::size_t>(k)] < best_cost) {
          best_cost = cand_comp[static_cast<std::size_t>(k)];
          best.es = k;
          best.steps = t.opt_steps(u, static_cast<std::size_t>(k));
        }
    } else {
      for (int m = 0; m < n_aps; ++m)
        for (int k = 0; k < n_es; ++k) {
          double cost =
              cand_acc[static_cast<std::size_t>(m)] + cand_comp[static_cast<std::size_t>(k)];
          if (cost < best_cost) {
            best_cost = cost;
            best.ap = m;
            best.es = k;
            best.steps = t.opt_steps(u, static_cast<std::size_t>(k));
          }
        }
    }
    best.improvement = current - best_cost;
    report.best_deviation.push_back(best);
    if (best.improvement > report.max_improvement) report.max_improvement = best.improvement;
    if (best.improvement > tolerance) report.is_ne = false;
  }
  return report;
}

}  // namespace jcaco
