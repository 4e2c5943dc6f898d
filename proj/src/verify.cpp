#include "jcaco/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "jcaco/baselines.hpp"
#include "jcaco/env.hpp"
#include "jcaco/game.hpp"
#include "jcaco/latency.hpp"
#include "jcaco/rng.hpp"
#include "jcaco/scenario.hpp"

namespace jcaco {
namespace {

// Small random instance for the verification suites; all scalar parameters
// come from the generator's default ranges.
Scenario small_instance(std::uint64_t seed, int index, int max_ues) {
  RngStream rng = RngStream::from(seed, {stream_label::kInstance,
                                         static_cast<std::uint64_t>(index)});
  GenConfig cfg;
  cfg.num_ues = 2 + static_cast<int>(rng.uniform_below(
                        static_cast<std::uint64_t>(max_ues - 1)));
  cfg.num_aps = 2 + static_cast<int>(rng.uniform_below(3));
  cfg.num_servers = 2 + static_cast<int>(rng.uniform_below(3));
  cfg.seed = rng.next_u64();
  return generate_scenario(cfg);
}

ActivityState sample_nonempty_activity(const Scenario& s, RngStream& rng) {
  for (;;) {
    ActivityState omega = sample_activity(s, rng);
    if (omega.count_active() > 0) return omega;
  }
}

StrategyProfile random_verify_profile(const Scenario& s, const UnitTimes& t, RngStream& rng) {
  const std::size_t n_ues = s.ues.size();
  StrategyProfile prof;
  prof.ap_choice.resize(n_ues);
  prof.es_choice.resize(n_ues);
  prof.steps.resize(n_ues);
  for (std::size_t n = 0; n < n_ues; ++n) {
    prof.ap_choice[n] = static_cast<int>(rng.uniform_below(s.aps.size()));
    auto k = rng.uniform_below(s.servers.size());
    prof.es_choice[n] = static_cast<int>(k);
    int opt = t.opt_steps(n, k);
    prof.steps[n] = rng.uniform_int(s.game.min_inference_steps,
                                    std::max(s.game.min_inference_steps, 2 * opt));
  }
  return prof;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

VerifyOutcome verify_sign_property(const VerifyConfig& cfg) {
  if (cfg.instances < 1) throw std::invalid_argument("verify: instances must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("verify: trials must be >= 1");
  const std::uint64_t per_view =
      (cfg.trials + static_cast<std::uint64_t>(cfg.instances) - 1) /
      static_cast<std::uint64_t>(cfg.instances);

  struct ViewTally {
    std::string name;
    std::uint64_t attempted = 0;
    std::uint64_t evaluated = 0;
    std::uint64_t violations = 0;
  };
  std::vector<ViewTally> tallies{{"access_complete"},
                                 {"access_stochastic"},
                                 {"compute_complete"},
                                 {"compute_stochastic"}};
  nlohmann::json violation_samples = nlohmann::json::array();

  for (int i = 0; i < cfg.instances; ++i) {
    Scenario s = small_instance(cfg.seed, i, 6);
    UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
    RngStream act = RngStream::from(cfg.seed, {stream_label::kInstance,
                                               static_cast<std::uint64_t>(i), 1});
    ActivityState omega = sample_nonempty_activity(s, act);

    for (int v = 0; v < 4; ++v) {
      PayoffKind kind = v < 2 ? PayoffKind::access : PayoffKind::compute;
      bool complete = v % 2 == 0;
      GameView view = complete ? make_complete_view(s, t, kind, omega)
                               : make_stochastic_view(s, t, kind,
                                                      StochasticBasis::expected_load);
      std::uint64_t check_seed =
          RngStream::from(cfg.seed, {stream_label::kInstance,
                                     static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(2 + v)})
              .next_u64();
      SignPropertyReport report = check_sign_property(view, per_view, check_seed);
      tallies[static_cast<std::size_t>(v)].attempted += report.attempted;
      tallies[static_cast<std::size_t>(v)].evaluated += report.evaluated;
      tallies[static_cast<std::size_t>(v)].violations += report.violations.size();
      for (const SignViolation& viol : report.violations) {
        if (violation_samples.size() >= 20) break;
        nlohmann::json j;
        j["instance"] = i;
        j["view"] = tallies[static_cast<std::size_t>(v)].name;
        j["trial"] = viol.trial;
        j["ue"] = viol.ue;
        j["deviation"] = viol.deviation;
        j["payoff_delta"] = viol.payoff_delta;
        j["potential_sign"] = viol.potential_sign;
        violation_samples.push_back(std::move(j));
      }
    }
  }

  VerifyOutcome out;
  out.ok = true;
  nlohmann::json views;
  for (const ViewTally& tally : tallies) {
    if (tally.violations > 0) out.ok = false;
    views[tally.name] = {{"attempted", tally.attempted},
                         {"evaluated", tally.evaluated},
                         {"violations", tally.violations}};
  }
  out.report = {{"suite", "sign-property"},
                {"instances", cfg.instances},
                {"deviations_per_view_per_instance", per_view},
                {"views", std::move(views)},
                {"violation_samples", std::move(violation_samples)},
                {"ok", out.ok}};
  return out;
}

VerifyOutcome verify_expectation(const VerifyConfig& cfg) {
  constexpr int kInstances = 20;
  constexpr int kMcSamples = 100000;
  constexpr double kRelTol = 1e-12;

  VerifyOutcome out;
  out.ok = true;
  nlohmann::json instances = nlohmann::json::array();

  for (int i = 0; i < kInstances; ++i) {
    Scenario s = small_instance(cfg.seed, i, 12);
    UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
    RngStream prof_rng = RngStream::from(cfg.seed, {stream_label::kInstance,
                                                    static_cast<std::uint64_t>(i), 3});
    StrategyProfile prof = random_verify_profile(s, t, prof_rng);

    std::vector<double> closed_ap = expected_ap_loads(s, t, prof);
    std::vector<double> closed_es = expected_es_loads(s, prof);

    // Exact check: enumerate the activity sample space.
    std::vector<double> enum_ap(s.aps.size(), 0.0);
    std::vector<double> enum_es(s.servers.size(), 0.0);
    for_each_activity_state(s, [&](const ActivityState& omega, double prob) {
      std::vector<double> ap = realized_ap_loads(s, t, prof, omega);
      std::vector<double> es = realized_es_loads(s, prof, omega);
      for (std::size_t m = 0; m < ap.size(); ++m) enum_ap[m] += prob * ap[m];
      for (std::size_t k = 0; k < es.size(); ++k) enum_es[k] += prob * es[k];
    });
    double max_rel = 0.0;
    for (std::size_t m = 0; m < closed_ap.size(); ++m)
      max_rel = std::max(max_rel, rel_err(closed_ap[m], enum_ap[m]));
    for (std::size_t k = 0; k < closed_es.size(); ++k)
      max_rel = std::max(max_rel, rel_err(closed_es[k], enum_es[k]));
    bool enum_ok = max_rel <= kRelTol;

    // Statistical check: Monte-Carlo estimate of the summed loads, one
    // z-score per game side.
    double closed_ap_total = 0.0, closed_es_total = 0.0;
    for (double v : closed_ap) closed_ap_total += v;
    for (double v : closed_es) closed_es_total += v;
    RngStream mc = RngStream::from(cfg.seed, {stream_label::kInstance,
                                              static_cast<std::uint64_t>(i), 4});
    double ap_sum = 0.0, ap_sq = 0.0, es_sum = 0.0, es_sq = 0.0;
    for (int j = 0; j < kMcSamples; ++j) {
      ActivityState omega = sample_activity(s, mc);
      std::vector<double> ap = realized_ap_loads(s, t, prof, omega);
      std::vector<double> es = realized_es_loads(s, prof, omega);
      double a = 0.0, e = 0.0;
      for (double v : ap) a += v;
      for (double v : es) e += v;
      ap_sum += a;
      ap_sq += a * a;
      es_sum += e;
      es_sq += e * e;
    }
    auto z_score = [&](double sum, double sq, double want) {
      double n = static_cast<double>(kMcSamples);
      double mean = sum / n;
      double var = std::max(0.0, (sq - sum * sum / n) / (n - 1.0));
      double se = std::sqrt(var / n);
      if (se == 0.0) return std::abs(mean - want) <= 1e-12 ? 0.0 : HUGE_VAL;
      return std::abs(mean - want) / se;
    };
    double z_ap = z_score(ap_sum, ap_sq, closed_ap_total);
    double z_es = z_score(es_sum, es_sq, closed_es_total);
    bool mc_ok = z_ap <= 3.0 && z_es <= 3.0;

    if (!(enum_ok && mc_ok)) out.ok = false;
    instances.push_back({{"instance", i},
                         {"num_ues", s.num_ues()},
                         {"max_rel_err", max_rel},
                         {"enum_ok", enum_ok},
                         {"z_access", z_ap},
                         {"z_compute", z_es},
                         {"mc_ok", mc_ok}});
  }

  out.report = {{"suite", "expectation"},
                {"instances", kInstances},
                {"mc_samples", kMcSamples},
                {"rel_tolerance", kRelTol},
                {"details", std::move(instances)},
                {"ok", out.ok}};
  return out;
}

VerifyOutcome verify_ne(const VerifyConfig& cfg) {
  if (cfg.instances < 1) throw std::invalid_argument("verify: instances must be >= 1");

  VerifyOutcome out;
  out.ok = true;
  nlohmann::json instances = nlohmann::json::array();

  for (int i = 0; i < cfg.instances; ++i) {
    Scenario s = small_instance(cfg.seed, i, 6);
    UnitTimes t = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
    RngStream act = RngStream::from(cfg.seed, {stream_label::kInstance,
                                               static_cast<std::uint64_t>(i), 1});
    ActivityState omega = sample_nonempty_activity(s, act);
    GameView view = make_complete_view(s, t, PayoffKind::total, omega);

    BaselineConfig bcfg;
    bcfg.seed = RngStream::from(cfg.seed, {stream_label::kInstance,
                                           static_cast<std::uint64_t>(i), 2})
                    .next_u64();
    BestResponseResult res = run_best_response(s, t, view, bcfg);

    // The improvement path must be shorter than the pure strategy space of
    // the players that can move (the potential takes finitely many values).
    double log_space = static_cast<double>(omega.count_active()) *
                       std::log2(static_cast<double>(s.aps.size()) *
                                 static_cast<double>(s.servers.size()));
    double space = log_space < 62.0 ? std::exp2(log_space) : HUGE_VAL;
    bool bound_ok = res.converged && static_cast<double>(res.moves) < space;

    // Replay the move log: every move must strictly decrease at least one
    // subgame potential and increase neither.
    StrategyProfile prof = run_raro(s, t, bcfg.seed);  // same seeded random start
    bool decrease_ok = true;
    const double log2_comm = std::log2(s.game.potential_base_comm);
    const double log2_comp = std::log2(s.game.potential_base_comp);
    // Only the two resources a move touches change their term; every other
    // term cancels exactly, and keeping them would drown small deltas under
    // the dominating exponent. Compare the touched entries alone.
    auto touched = [](const std::vector<double>& before,
                      const std::vector<double>& after, int a, int b) {
      std::vector<double> x{before[static_cast<std::size_t>(a)]};
      std::vector<double> y{after[static_cast<std::size_t>(a)]};
      if (b != a) {
        x.push_back(before[static_cast<std::size_t>(b)]);
        y.push_back(after[static_cast<std::size_t>(b)]);
      }
      return std::pair{x, y};
    };
    for (const MoveRecord& mv : res.move_log) {
      auto n = static_cast<std::size_t>(mv.ue);
      std::vector<double> ap_before = realized_ap_loads(s, t, prof, omega);
      std::vector<double> es_before = realized_es_loads(s, prof, omega);
      prof.ap_choice[n] = mv.new_ap;
      prof.es_choice[n] = mv.new_es;
      prof.steps[n] = mv.new_steps;
      std::vector<double> ap_after = realized_ap_loads(s, t, prof, omega);
      std::vector<double> es_after = realized_es_loads(s, prof, omega);
      auto [ap_x, ap_y] = touched(ap_before, ap_after, mv.old_ap, mv.new_ap);
      auto [es_x, es_y] = touched(es_before, es_after, mv.old_es, mv.new_es);
      int sign_acc = potential_delta_sign(ap_x, ap_y, log2_comm);
      int sign_comp = potential_delta_sign(es_x, es_y, log2_comp);
      if (sign_acc > 0 || sign_comp > 0 || (sign_acc == 0 && sign_comp == 0)) {
        decrease_ok = false;
        break;
      }
    }

    NeReport ne = is_nash_equilibrium(view, res.profile, bcfg.tolerance);
    bool instance_ok = bound_ok && decrease_ok && ne.is_ne;
    if (!instance_ok) out.ok = false;
    instances.push_back({{"instance", i},
                         {"active_ues", omega.count_active()},
                         {"moves", res.moves},
                         {"rounds", res.rounds},
                         {"converged", res.converged},
                         {"bound_ok", bound_ok},
                         {"potential_decrease_ok", decrease_ok},
                         {"terminal_ne", ne.is_ne},
                         {"max_improvement", ne.max_improvement}});
  }

  out.report = {{"suite", "ne"},
                {"instances", cfg.instances},
                {"details", std::move(instances)},
                {"ok", out.ok}};
  return out;
}

VerifyOutcome run_verify_suite(const std::string& suite, const VerifyConfig& cfg) {
  if (suite == "sign-property") return verify_sign_property(cfg);
  if (suite == "expectation") return verify_expectation(cfg);
  if (suite == "ne") return verify_ne(cfg);
  throw std::invalid_argument("unknown verify suite: " + suite +
                              " (expected sign-property, expectation, or ne)");
}

}  // namespace jcaco
