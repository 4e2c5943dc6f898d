#include "jcaco/masl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jcaco {
namespace {

// First index whose cumulative probability exceeds the draw; zero-probability
// actions are never selected, so a pure row always yields its hot index.
int sample_index(std::span<const double> probs, RngStream& rng) {
  double u = rng.uniform01();
  double cum = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = static_cast<int>(i);
    cum += probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  if (last_positive < 0) throw std::domain_error("sample_index: all probabilities zero");
  return last_positive;  // u fell into rounding slack at the top of the CDF
}

double clamp_reward(double r) { return std::clamp(r, 0.0, 1.0); }

double row_delta_l2(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

void require_valid(const Scenario& s) {
  ValidationReport report = validate(s);
  if (!report.ok())
    throw std::invalid_argument("invalid scenario: " + report.violations.front().path + " " +
                                report.violations.front().message);
}

void require_learn_config(const LearnConfig& cfg) {
  if (!(cfg.rate > 0.0 && cfg.rate < 1.0))
    throw std::invalid_argument("learning rate must be in (0, 1)");
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("convergence delta must be positive");
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be at least 1");
  if (cfg.mobility && cfg.mobility_step_m < 0.0)
    throw std::invalid_argument("mobility_step_m must be non-negative");
}

// Shared learner core: the access and offload learners differ only in the
// action set, the per-pair unit times, and their stream domain.
struct LearnerSetup {
  std::uint64_t domain = 0;           // stream label separating the two games
  const Grid<double>* unit_s = nullptr;  // N x actions unit times (may be rebuilt)
  std::vector<double> bound_s;        // reward normalizers
};

}  // namespace

RewardNormalizers compute_normalizers(const Scenario& s, const UnitTimes& t) {
  RewardNormalizers norm;
  const std::size_t n_ues = s.ues.size();
  norm.access_bound_s.resize(n_ues);
  norm.compute_bound_s.resize(n_ues);
  // Per-UE bound on the delays actually observed along the learning
  // trajectory, fixed a priori from scenario constants: the UE's own unit
  // time plus the expected resource load under the uniform initial mixture,
  // at the worst resource. Learners start uniform, so early observations sit
  // at or below this level, and concentration later only shifts load between
  // resources. A worst-case all-on-one-resource bound would be 5-15x looser
  // and flatten every reward toward 1, leaving the reward-inaction update
  // with no selection signal; the clamp in the reward covers the rare
  // transient that exceeds this bound.
  const auto m_count = static_cast<double>(s.aps.size());
  const auto k_count = static_cast<double>(s.servers.size());
  for (std::size_t n = 0; n < n_ues; ++n) {
    double acc = 0.0;
    for (std::size_t m = 0; m < s.aps.size(); ++m) {
      double uniform_load = 0.0;
      for (std::size_t o = 0; o < n_ues; ++o)
        if (o != n) uniform_load += s.ues[o].active_prob * t.tx_s(o, m);
      acc = std::max(acc, t.tx_s(n, m) + uniform_load / m_count);
    }
    norm.access_bound_s[n] = acc;
    double comp = 0.0;
    for (std::size_t k = 0; k < s.servers.size(); ++k) {
      double uniform_load = 0.0;
      for (std::size_t o = 0; o < n_ues; ++o)
        if (o != n) uniform_load += s.ues[o].active_prob * t.opt_compute_s(o, k);
      comp = std::max(comp, t.opt_compute_s(n, k) + uniform_load / k_count);
    }
    norm.compute_bound_s[n] = comp;
  }
  return norm;
}

std::vector<double> lri_update(std::span<const double> probs, int chosen, double reward,
                               double rate) {
  if (chosen < 0 || static_cast<std::size_t>(chosen) >= probs.size())
    throw std::invalid_argument("lri_update: chosen index out of range");
  if (!(reward >= 0.0 && reward <= 1.0))
    throw std::domain_error("lri_update: reward outside [0, 1]");
  if (!(rate > 0.0 && rate < 1.0))
    throw std::invalid_argument("lri_update: rate outside (0, 1)");
  std::vector<double> out(probs.begin(), probs.end());
  if (reward == 0.0) return out;  // bit-identical no-op
  const double shrink = 1.0 - rate * reward;
  double others = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (static_cast<int>(i) == chosen) continue;
    out[i] *= shrink;
    others += out[i];
  }
  // Assign the chosen entry as the exact complement so the row stays on the
  // simplex to the last bit.
  out[static_cast<std::size_t>(chosen)] = 1.0 - others;
  return out;
}

double access_reward(const Scenario& s, const UnitTimes& t, const RewardNormalizers& norm,
                     const StrategyProfile& prof, int ue, DelayMode mode,
                     const ActivityState* omega) {
  double observed;
  if (mode == DelayMode::expected) {
    observed = conditional_access_delay_s(s, t, prof, ue);
  } else {
    if (omega == nullptr || !omega->is_active(ue))
      throw std::domain_error("access_reward: realized mode needs the UE active");
    auto loads = realized_ap_loads(s, t, prof, *omega);
    observed = loads[static_cast<std::size_t>(prof.ap_choice[static_cast<std::size_t>(ue)])];
  }
  return clamp_reward(1.0 - observed / norm.access_bound_s[static_cast<std::size_t>(ue)]);
}

double compute_reward(const Scenario& s, const RewardNormalizers& norm,
                      const StrategyProfile& prof, int ue, DelayMode mode,
                      const ActivityState* omega) {
  double observed;
  if (mode == DelayMode::expected) {
    observed = conditional_compute_delay_s(s, prof, ue);
  } else {
    if (omega == nullptr || !omega->is_active(ue))
      throw std::domain_error("compute_reward: realized mode needs the UE active");
    auto loads = realized_es_loads(s, prof, *omega);
    observed = loads[static_cast<std::size_t>(prof.es_choice[static_cast<std::size_t>(ue)])];
  }
  return clamp_reward(1.0 - observed / norm.compute_bound_s[static_cast<std::size_t>(ue)]);
}

namespace {

LearnResult run_learner(const Scenario& s, const LearnConfig& cfg, bool access_game,
                        const LearnObserver& observe) {
  require_valid(s);
  require_learn_config(cfg);

  const std::size_t n_ues = s.ues.size();
  const std::uint64_t domain =
      access_game ? stream_label::kAccessGame : stream_label::kComputeGame;

  std::vector<Vec2> positions = ue_positions(s);
  UnitTimes times = compute_unit_times(s, deterministic_channel(s, positions));
  // Normalizers are fixed a priori on the fading-free initial-position
  // channel, even when fading or mobility later perturb the observed delays.
  RewardNormalizers norm = compute_normalizers(s, times);

  const std::size_t n_actions = access_game ? s.aps.size() : s.servers.size();
  Grid<double> probs(n_ues, n_actions, 1.0 / static_cast<double>(n_actions));

  // Current pure action of every UE (inactive UEs hold their last choice and
  // still contribute expectation-weighted load to others' observations).
  StrategyProfile prof;
  prof.ap_choice.assign(n_ues, 0);
  prof.es_choice.assign(n_ues, 0);
  prof.steps.assign(n_ues, s.game.min_inference_steps);
  for (std::size_t n = 0; n < n_ues; ++n) {
    RngStream init = RngStream::from(cfg.seed, {domain, stream_label::kInitAction,
                                                static_cast<std::uint64_t>(n)});
    int a = sample_index(probs.row(n), init);
    if (access_game) {
      prof.ap_choice[n] = a;
    } else {
      prof.es_choice[n] = a;
      prof.steps[n] = times.opt_steps(n, static_cast<std::size_t>(a));
    }
  }

  LearnResult result;
  result.converged = false;
  std::vector<double> rewards(n_ues, 0.0);
  std::vector<double> old_row(n_actions, 0.0);

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    if (access_game && cfg.mobility) {
      RngStream move = RngStream::from(cfg.seed, {domain, stream_label::kMobility,
                                                  static_cast<std::uint64_t>(iter)});
      positions = step_mobility(s, positions, cfg.mobility_step_m, move);
    }
    if (access_game && (cfg.mobility || cfg.fading)) {
      ChannelRealization ch = deterministic_channel(s, positions);
      if (cfg.fading) {
        RngStream fade = RngStream::from(cfg.seed, {domain, stream_label::kFading,
                                                    static_cast<std::uint64_t>(iter)});
        for (std::size_t n = 0; n < n_ues; ++n)
          for (std::size_t m = 0; m < s.aps.size(); ++m) ch.gain(n, m) *= fade.exponential(1.0);
      }
      // Step counts are channel-independent; only transmission times move.
      UnitTimes fresh = compute_unit_times(s, ch);
      times.tx_s = std::move(fresh.tx_s);
    }

    RngStream act = RngStream::from(cfg.seed, {domain, stream_label::kActivity,
                                               static_cast<std::uint64_t>(iter)});
    ActivityState omega = sample_activity(s, act);

    // Phase 1: every active UE samples an action from its mixed strategy.
    for (std::size_t n = 0; n < n_ues; ++n) {
      if (!omega.active[n]) continue;
      RngStream draw = RngStream::from(cfg.seed, {domain, stream_label::kAction,
                                                  static_cast<std::uint64_t>(iter),
                                                  static_cast<std::uint64_t>(n)});
      int a = sample_index(probs.row(n), draw);
      if (access_game) {
        prof.ap_choice[n] = a;
      } else {
        prof.es_choice[n] = a;
        prof.steps[n] = times.opt_steps(n, static_cast<std::size_t>(a));
      }
    }

    // Phase 2: rewards on the complete slot snapshot.
    std::vector<double> exp_loads = access_game ? expected_ap_loads(s, times, prof)
                                                : expected_es_loads(s, prof);
    std::vector<double> real_loads;
    if (cfg.delay_mode == DelayMode::realized)
      real_loads = access_game ? realized_ap_loads(s, times, prof, omega)
                               : realized_es_loads(s, prof, omega);
    for (std::size_t n = 0; n < n_ues; ++n) {
      if (!omega.active[n]) continue;
      auto choice = static_cast<std::size_t>(access_game ? prof.ap_choice[n]
                                                         : prof.es_choice[n]);
      double own = access_game
                       ? times.tx_s(n, choice)
                       : unit_compute_time_s(s.servers[choice], prof.steps[n]);
      double observed;
      if (cfg.delay_mode == DelayMode::expected) {
        // Conditional expectation given this UE is active: own term at
        // weight 1 instead of its activity probability.
        observed = exp_loads[choice] + (1.0 - s.ues[n].active_prob) * own;
      } else {
        observed = real_loads[choice];
      }
      double bound = access_game ? norm.access_bound_s[n] : norm.compute_bound_s[n];
      rewards[n] = clamp_reward(1.0 - observed / bound);
    }

    // Phase 3: reward-inaction updates; inactive rows stay bit-identical.
    double max_delta = 0.0;
    for (std::size_t n = 0; n < n_ues; ++n) {
      if (!omega.active[n]) continue;
      auto row = probs.row(n);
      std::copy(row.begin(), row.end(), old_row.begin());
      int chosen = access_game ? prof.ap_choice[n] : prof.es_choice[n];
      std::vector<double> updated = lri_update(row, chosen, rewards[n], cfg.rate);
      std::copy(updated.begin(), updated.end(), row.begin());
      max_delta = std::max(max_delta, row_delta_l2(row, old_row));
    }

    if (cfg.record_trace) {
      IterationRecord rec;
      rec.iteration = iter;
      rec.max_strategy_delta = max_delta;
      rec.ue_delays_s.resize(n_ues);
      double objective = 0.0;
      for (std::size_t n = 0; n < n_ues; ++n) {
        auto choice = static_cast<std::size_t>(access_game ? prof.ap_choice[n]
                                                           : prof.es_choice[n]);
        double own = access_game
                         ? times.tx_s(n, choice)
                         : unit_compute_time_s(s.servers[choice], prof.steps[n]);
        objective += exp_loads[choice];
        rec.ue_delays_s[n] = exp_loads[choice] + (1.0 - s.ues[n].active_prob) * own;
      }
      rec.objective_s = objective;
      result.trace.push_back(std::move(rec));
    }

    if (observe) observe(iter, omega, probs);

    result.iterations = iter;
    if (max_delta < cfg.delta) {
      result.converged = true;
      break;
    }
  }

  result.probs = std::move(probs);
  result.final_actions.resize(n_ues);
  for (std::size_t n = 0; n < n_ues; ++n)
    result.final_actions[n] = access_game ? prof.ap_choice[n] : prof.es_choice[n];
  return result;
}

}  // namespace

LearnResult run_alg1(const Scenario& s, const LearnConfig& cfg, const LearnObserver& observe) {
  return run_learner(s, cfg, /*access_game=*/true, observe);
}

LearnResult run_alg2(const Scenario& s, const LearnConfig& cfg, const LearnObserver& observe) {
  return run_learner(s, cfg, /*access_game=*/false, observe);
}

std::vector<int> decode_pure(const Grid<double>& probs) {
  std::vector<int> out(probs.rows(), 0);
  for (std::size_t n = 0; n < probs.rows(); ++n) {
    auto row = probs.row(n);
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
      if (row[i] > row[best]) best = i;  // ties stay at the lowest index
    out[n] = static_cast<int>(best);
  }
  return out;
}

JcacoResult run_jcaco(const Scenario& s, const JcacoConfig& cfg) {
  LearnConfig access_cfg;
  access_cfg.rate = cfg.alpha;
  access_cfg.delta = cfg.delta;
  access_cfg.max_iterations = cfg.max_iterations;
  access_cfg.delay_mode = cfg.delay_mode;
  access_cfg.seed = cfg.seed;
  access_cfg.fading = cfg.fading;
  access_cfg.mobility = cfg.mobility;
  access_cfg.mobility_step_m = cfg.mobility_step_m;
  access_cfg.record_trace = cfg.record_trace;

  LearnConfig offload_cfg = access_cfg;
  offload_cfg.rate = cfg.beta;
  offload_cfg.fading = false;  // compute times are channel-independent
  offload_cfg.mobility = false;

  JcacoResult result;
  result.access = run_alg1(s, access_cfg);
  result.compute = run_alg2(s, offload_cfg);

  UnitTimes times = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  result.decoded.ap_choice = decode_pure(result.access.probs);
  result.decoded.es_choice = decode_pure(result.compute.probs);
  result.decoded.steps.resize(s.ues.size());
  for (std::size_t n = 0; n < s.ues.size(); ++n)
    result.decoded.steps[n] =
        times.opt_steps(n, static_cast<std::size_t>(result.decoded.es_choice[n]));

  GameView acc_view = make_stochastic_view(s, times, PayoffKind::access);
  GameView comp_view = make_stochastic_view(s, times, PayoffKind::compute);
  result.ne_access = is_nash_equilibrium(acc_view, result.decoded, cfg.ne_tolerance);
  result.ne_compute = is_nash_equilibrium(comp_view, result.decoded, cfg.ne_tolerance);
  result.final_objective_s = system_expected_total_s(s, times, result.decoded);
  result.converged = result.access.converged && result.compute.converged;
  return result;
}

Grid<double> estimate_drift(const Scenario& s, const Grid<double>& ap_probs, int n_samples,
                            std::uint64_t seed) {
  require_valid(s);
  if (ap_probs.rows() != s.ues.size() || ap_probs.cols() != s.aps.size())
    throw std::invalid_argument("estimate_drift: strategy matrix shape mismatch");
  if (n_samples < 1) throw std::invalid_argument("estimate_drift: need at least one sample");

  UnitTimes times = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  RewardNormalizers norm = compute_normalizers(s, times);
  const std::size_t n_ues = s.ues.size();
  const std::size_t n_aps = s.aps.size();

  Grid<double> drift(n_ues, n_aps, 0.0);
  StrategyProfile prof;
  prof.ap_choice.assign(n_ues, 0);
  prof.es_choice.assign(n_ues, 0);
  prof.steps.assign(n_ues, s.game.min_inference_steps);

  for (int j = 0; j < n_samples; ++j) {
    RngStream act = RngStream::from(seed, {stream_label::kDrift,
                                           static_cast<std::uint64_t>(j), 0});
    ActivityState omega = sample_activity(s, act);
    // Every UE's current action is drawn from its mixed strategy (the
    // stationary reading of "held" actions), active or not, because held
    // actions shape what active UEs observe.
    for (std::size_t n = 0; n < n_ues; ++n) {
      RngStream draw = RngStream::from(seed, {stream_label::kDrift,
                                              static_cast<std::uint64_t>(j),
                                              static_cast<std::uint64_t>(n) + 1});
      prof.ap_choice[n] = sample_index(ap_probs.row(n), draw);
    }
    std::vector<double> loads = expected_ap_loads(s, times, prof);
    for (std::size_t n = 0; n < n_ues; ++n) {
      if (!omega.active[n]) continue;
      auto m = static_cast<std::size_t>(prof.ap_choice[n]);
      double observed = loads[m] + (1.0 - s.ues[n].active_prob) * times.tx_s(n, m);
      double r = clamp_reward(1.0 - observed / norm.access_bound_s[n]);
      // Per-unit-rate update direction: r * (indicator(chosen) - row).
      auto row = ap_probs.row(n);
      for (std::size_t i = 0; i < n_aps; ++i) {
        double e = i == m ? 1.0 : 0.0;
        drift(n, i) += r * (e - row[i]);
      }
    }
  }
  for (std::size_t n = 0; n < n_ues; ++n)
    for (std::size_t i = 0; i < n_aps; ++i) drift(n, i) /= static_cast<double>(n_samples);
  return drift;
}

}  // namespace jcaco
