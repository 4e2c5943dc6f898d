#include "jcaco/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jcaco/baselines.hpp"
#include "jcaco/harness.hpp"
#include "jcaco/masl.hpp"
#include "jcaco/scenario_io.hpp"
#include "jcaco/util.hpp"
#include "jcaco/verify.hpp"

namespace jcaco {
namespace {

using DoublePair = std::pair<double, double>;

// Scenario-generation options shared by `generate` and `sweep`. Ranges are
// passed as two values (min max); a collapsed pair pins the value.
struct GenFlags {
  GenConfig cfg;
  DoublePair bandwidth_mhz{2.0, 10.0};
  DoublePair flops_per_sec{2.0, 10.0};
  DoublePair flops_per_step{0.1, 0.5};
  DoublePair forward_error_scale{1.0, 2.0};
  DoublePair data_mb{2.0, 10.0};
  DoublePair active_prob{0.0, 1.0};
  DoublePair error_threshold{0.05, 0.2};
  DoublePair fitness{0.05, 0.2};
  DoublePair tx_power_watts{0.2, 0.2};

  GenConfig to_config() const {
    GenConfig g = cfg;
    auto range = [](const DoublePair& p) { return Range{p.first, p.second}; };
    g.bandwidth_hz = Range{bandwidth_mhz.first * 1e6, bandwidth_mhz.second * 1e6};
    g.flops_per_sec = range(flops_per_sec);
    g.flops_per_step = range(flops_per_step);
    g.forward_error_scale = range(forward_error_scale);
    g.data_size_mb = range(data_mb);
    g.active_prob = range(active_prob);
    g.error_threshold = range(error_threshold);
    g.fitness = range(fitness);
    g.tx_power_watts = range(tx_power_watts);
    return g;
  }
};

void add_gen_options(CLI::App* cmd, GenFlags& f) {
  cmd->add_option("--num-aps", f.cfg.num_aps, "access point count")->capture_default_str();
  cmd->add_option("--num-es", f.cfg.num_servers, "edge server count")->capture_default_str();
  cmd->add_option("--num-ues", f.cfg.num_ues, "user equipment count")->capture_default_str();
  cmd->add_option("--area-side", f.cfg.area_side_m, "square area side, meters")
      ->capture_default_str();
  cmd->add_option("--bandwidth-mhz", f.bandwidth_mhz, "AP bandwidth range, MHz");
  cmd->add_option("--flops-per-sec", f.flops_per_sec, "server rate range, TFLOPs/s");
  cmd->add_option("--flops-per-step", f.flops_per_step,
                  "per-inference-step work range, TFLOPs");
  cmd->add_option("--forward-error-scale", f.forward_error_scale,
                  "per-step error scale range");
  cmd->add_option("--data-mb", f.data_mb, "task payload range, MB");
  cmd->add_option("--active-prob", f.active_prob,
                  "activity probability range (quantized into (0, 1])");
  cmd->add_option("--error-threshold", f.error_threshold,
                  "acceptable inference error range");
  cmd->add_option("--fitness", f.fitness, "UE-server fitness coefficient range");
  cmd->add_option("--tx-power-watts", f.tx_power_watts, "transmit power range, W");
  cmd->add_option("--path-loss-exponent", f.cfg.path_loss_exponent, "path loss exponent")
      ->capture_default_str();
  cmd->add_option("--noise-dbm", f.cfg.noise_psd_dbm_per_hz, "noise PSD, dBm/Hz")
      ->capture_default_str();
  cmd->add_flag("--rayleigh", f.cfg.rayleigh_enabled, "enable exponential channel fading");
  cmd->add_option("--min-steps", f.cfg.min_inference_steps, "minimum inference steps")
      ->capture_default_str();
}

struct MaslFlags {
  JcacoConfig cfg;
  std::string delay_mode = "expected";

  JcacoConfig to_config() const {
    JcacoConfig c = cfg;
    if (delay_mode == "expected") {
      c.delay_mode = DelayMode::expected;
    } else if (delay_mode == "realized") {
      c.delay_mode = DelayMode::realized;
    } else {
      throw std::invalid_argument("--delay-mode must be expected or realized, got " +
                                  delay_mode);
    }
    return c;
  }
};

void add_masl_options(CLI::App* cmd, MaslFlags& f) {
  cmd->add_option("--alpha", f.cfg.alpha, "access learning rate")->capture_default_str();
  cmd->add_option("--beta", f.cfg.beta, "offload learning rate")->capture_default_str();
  cmd->add_option("--delta", f.cfg.delta, "convergence threshold on strategy change")
      ->capture_default_str();
  cmd->add_option("--max-iter", f.cfg.max_iterations, "iteration budget per learner")
      ->capture_default_str();
  cmd->add_option("--delay-mode", f.delay_mode, "reward observation: expected|realized")
      ->capture_default_str()
      ->check(CLI::IsMember({"expected", "realized"}));
  cmd->add_flag("--fading", f.cfg.fading, "redraw channel fading every iteration");
  cmd->add_flag("--mobility", f.cfg.mobility, "random-walk UE positions every iteration");
  cmd->add_option("--mobility-step", f.cfg.mobility_step_m, "mobility step, meters")
      ->capture_default_str();
  cmd->add_option("--ne-tolerance", f.cfg.ne_tolerance,
                  "equilibrium improvement tolerance, seconds")
      ->capture_default_str();
}

std::string trace_csv(const Scenario& s, const JcacoResult& res) {
  std::string out = "phase,iteration,objective_s,max_strategy_delta";
  for (int n = 0; n < s.num_ues(); ++n) out += ",delay_ue" + std::to_string(n) + "_s";
  out += '\n';
  auto emit = [&](const char* phase, const std::vector<IterationRecord>& trace) {
    for (const IterationRecord& rec : trace) {
      out += phase;
      out += ',';
      out += std::to_string(rec.iteration);
      out += ',';
      out += format_double(rec.objective_s);
      out += ',';
      out += format_double(rec.max_strategy_delta);
      for (double d : rec.ue_delays_s) {
        out += ',';
        out += format_double(d);
      }
      out += '\n';
    }
  };
  emit("access", res.access.trace);
  emit("compute", res.compute.trace);
  return out;
}

nlohmann::json ne_json(const NeReport& ne) {
  return {{"is_ne", ne.is_ne}, {"max_improvement_s", ne.max_improvement}};
}

nlohmann::json summary_json(const std::string& algo, const JcacoConfig& cfg,
                            const std::string& delay_mode, const JcacoResult& res) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = {{"algorithm", algo},
                 {"alpha", cfg.alpha},
                 {"beta", cfg.beta},
                 {"delta", cfg.delta},
                 {"max_iterations", cfg.max_iterations},
                 {"delay_mode", delay_mode},
                 {"seed", cfg.seed},
                 {"fading", cfg.fading},
                 {"mobility", cfg.mobility},
                 {"mobility_step_m", cfg.mobility_step_m},
                 {"ne_tolerance", cfg.ne_tolerance}};
  j["access"] = {{"converged", res.access.converged},
                 {"iterations", res.access.iterations}};
  j["compute"] = {{"converged", res.compute.converged},
                  {"iterations", res.compute.iterations}};
  j["decoded"] = {{"ap_choice", res.decoded.ap_choice},
                  {"es_choice", res.decoded.es_choice},
                  {"steps", res.decoded.steps}};
  j["ne_access"] = ne_json(res.ne_access);
  j["ne_compute"] = ne_json(res.ne_compute);
  j["final_objective_s"] = res.final_objective_s;
  j["converged"] = res.converged;
  return j;
}

void require_valid_scenario(const Scenario& s, const std::string& path) {
  ValidationReport report = validate(s);
  if (!report.ok())
    throw std::invalid_argument(path + ": " + report.violations.front().path + " " +
                                report.violations.front().message);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int do_generate(const GenFlags& flags, const std::string& out_path) {
  Scenario s = generate_scenario(flags.to_config());
  save_scenario_file(s, out_path);
  std::cout << "wrote " << out_path << ": " << s.num_aps() << " aps, " << s.num_servers()
            << " servers, " << s.num_ues() << " ues\n";
  return 0;
}

// Baselines produce the same outputs as the learner: the decoded profile is
// the baseline's assignment, the NE reports use the same checker, and the
// trace carries a single record per phase at the final profile.
JcacoResult run_baseline(const Scenario& s, const std::string& algo, const JcacoConfig& cfg,
                         const BaselineConfig& bcfg) {
  UnitTimes times = compute_unit_times(s, deterministic_channel(s, ue_positions(s)));
  JcacoResult res;
  if (algo == "br") {
    GameView view = make_stochastic_view(s, times, PayoffKind::total);
    BestResponseResult br = run_best_response(s, times, view, bcfg);
    res.decoded = br.profile;
    res.access.converged = res.compute.converged = br.converged;
    res.access.iterations = res.compute.iterations = br.rounds;
  } else if (algo == "mxfp") {
    MxfpResult mx = run_mxfp(s, times, bcfg);
    res.decoded = mx.profile;
    res.access.converged = res.compute.converged = mx.converged;
    res.access.iterations = res.compute.iterations = mx.rounds;
  } else if (algo == "selfish") {
    res.decoded = run_selfish(s, times);
    res.access.converged = res.compute.converged = true;
    res.access.iterations = res.compute.iterations = 1;
  } else if (algo == "raro") {
    res.decoded = run_raro(s, times, bcfg.seed);
    res.access.converged = res.compute.converged = true;
    res.access.iterations = res.compute.iterations = 1;
  } else {
    throw std::invalid_argument("unknown algorithm: " + algo);
  }

  std::vector<double> ap_loads = expected_ap_loads(s, times, res.decoded);
  std::vector<double> es_loads = expected_es_loads(s, res.decoded);
  auto snapshot = [&](bool access_phase) {
    IterationRecord rec;
    rec.iteration = 1;
    rec.ue_delays_s.resize(s.ues.size());
    for (std::size_t n = 0; n < s.ues.size(); ++n) {
      auto choice = static_cast<std::size_t>(access_phase ? res.decoded.ap_choice[n]
                                                          : res.decoded.es_choice[n]);
      rec.objective_s += access_phase ? ap_loads[choice] : es_loads[choice];
      rec.ue_delays_s[n] = access_phase
                               ? conditional_access_delay_s(s, times, res.decoded, (int)n)
                               : conditional_compute_delay_s(s, res.decoded, (int)n);
    }
    return rec;
  };
  res.access.trace.push_back(snapshot(true));
  res.compute.trace.push_back(snapshot(false));

  GameView acc_view = make_stochastic_view(s, times, PayoffKind::access);
  GameView comp_view = make_stochastic_view(s, times, PayoffKind::compute);
  res.ne_access = is_nash_equilibrium(acc_view, res.decoded, cfg.ne_tolerance);
  res.ne_compute = is_nash_equilibrium(comp_view, res.decoded, cfg.ne_tolerance);
  res.final_objective_s = system_expected_total_s(s, times, res.decoded);
  res.converged = res.access.converged && res.compute.converged;
  return res;
}

int do_run(const std::string& algo, const MaslFlags& flags, const BaselineConfig& bcfg,
           const std::string& scenario_path, const std::string& out_dir) {
  Scenario s = load_scenario_file(scenario_path);
  require_valid_scenario(s, scenario_path);
  JcacoConfig cfg = flags.to_config();
  JcacoResult res;
  if (algo == "masl") {
    res = run_jcaco(s, cfg);
  } else {
    BaselineConfig bc = bcfg;
    bc.seed = cfg.seed;
    res = run_baseline(s, algo, cfg, bc);
  }
  write_file_atomic(out_dir + "/trace.csv", trace_csv(s, res));
  write_file_atomic(out_dir + "/summary.json",
                    summary_json(algo, cfg, flags.delay_mode, res).dump(2) + "\n");
  std::cout << "access: " << (res.access.converged ? "converged" : "iteration budget hit")
            << " after " << res.access.iterations << " iterations\n"
            << "compute: " << (res.compute.converged ? "converged" : "iteration budget hit")
            << " after " << res.compute.iterations << " iterations\n"
            << "decoded profile: access NE " << (res.ne_access.is_ne ? "yes" : "no")
            << ", offload NE " << (res.ne_compute.is_ne ? "yes" : "no")
            << ", expected system delay " << format_double(res.final_objective_s) << " s\n"
            << "wrote " << out_dir << "/trace.csv and " << out_dir << "/summary.json\n";
  return 0;
}

int do_verify(const std::string& suite, const VerifyConfig& cfg, const std::string& out_path) {
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = {"sign-property", "expectation", "ne"};
  } else {
    suites = {suite};
  }
  bool all_ok = true;
  nlohmann::json reports = nlohmann::json::array();
  for (const std::string& name : suites) {
    VerifyOutcome outcome = run_verify_suite(name, cfg);
    all_ok = all_ok && outcome.ok;
    reports.push_back(std::move(outcome.report));
    std::cout << name << ": " << (outcome.ok ? "ok" : "VIOLATION") << "\n";
  }
  nlohmann::json root = {{"schema_version", 1}, {"ok", all_ok}, {"suites", std::move(reports)}};
  std::string text = root.dump(2) + "\n";
  if (!out_path.empty()) {
    write_file_atomic(out_path, text);
    std::cout << "wrote " << out_path << "\n";
  }
  return all_ok ? 0 : 2;
}

struct SweepFlags {
  std::string param = "num_ues";
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  int num_seeds = 20;
  std::vector<std::string> algos{"masl"};
  double baseline_tolerance = 1e-3;
  int baseline_rounds = 500;
};

int do_sweep(const SweepFlags& flags, const GenFlags& gen, const MaslFlags& masl,
             const std::string& out_dir) {
  SweepSpec spec;
  spec.param = sweep_param_from_name(flags.param);
  spec.values = flags.values;
  spec.seeds = flags.seeds;
  if (spec.seeds.empty()) {
    if (flags.num_seeds < 1) throw std::invalid_argument("--num-seeds must be >= 1");
    for (int i = 0; i < flags.num_seeds; ++i)
      spec.seeds.push_back(static_cast<std::uint64_t>(i));
  }
  spec.algorithms.clear();
  for (const std::string& name : flags.algos) spec.algorithms.push_back(algo_from_name(name));
  spec.base = gen.to_config();
  spec.masl = masl.to_config();
  spec.baseline.tolerance = flags.baseline_tolerance;
  spec.baseline.max_rounds = flags.baseline_rounds;

  SweepResult res = run_sweep(spec, out_dir);
  std::cout << "ran " << res.rows.size() << " runs over " << spec.values.size()
            << " values of " << flags.param << "\n";
  for (const auto& [key, cell] : res.aggregate) {
    std::cout << "  " << key.first << " @ " << format_double(key.second) << ": "
              << cell.converged << "/" << cell.total
              << " converged, mean objective " << format_double(cell.mean_objective_s)
              << " s\n";
  }
  std::cout << "wrote " << out_dir << "/runs.csv and " << out_dir << "/aggregate.json\n";
  return 0;
}

int do_report(const std::string& in_dir, const std::string& expect, const std::string& algo,
              double tolerance) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(read_text_file(in_dir + "/aggregate.json"));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(in_dir + "/aggregate.json: " + e.what());
  }
  if (!root.contains("cells") || !root["cells"].is_array())
    throw std::invalid_argument(in_dir + "/aggregate.json: missing cells array");

  std::cout << "param: " << root.value("param", std::string("?")) << "\n";
  std::cout << "algorithm value total converged mean_objective_s stddev_objective_s "
               "mean_iterations\n";
  // Cells arrive sorted by (algorithm, value); collect the requested
  // algorithm's mean series in that order for the trend check.
  std::vector<double> means;
  for (const auto& cell : root["cells"]) {
    std::string name = cell.value("algorithm", std::string("?"));
    std::cout << name << " " << format_double(cell.value("value", 0.0)) << " "
              << cell.value("total", 0) << " " << cell.value("converged", 0) << " "
              << format_double(cell.value("mean_objective_s", 0.0)) << " "
              << format_double(cell.value("stddev_objective_s", 0.0)) << " "
              << format_double(cell.value("mean_iterations", 0.0)) << "\n";
    if (name == algo) {
      if (cell.value("converged", 0) == 0 && !expect.empty())
        throw std::invalid_argument("no converged runs for " + algo + " at value " +
                                    format_double(cell.value("value", 0.0)));
      means.push_back(cell.value("mean_objective_s", 0.0));
    }
  }
  if (expect.empty()) return 0;
  if (means.empty())
    throw std::invalid_argument("no aggregate cells for algorithm " + algo);
  Trend trend = expect == "decreasing" ? Trend::decreasing : Trend::increasing;
  TrendReport report = trend_check(means, trend, tolerance);
  std::cout << "trend " << expect << " for " << algo << ": "
            << (report.pass ? "ok" : "VIOLATION") << "\n"
            << report.evidence << "\n";
  return report.pass ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"edge inference association and offloading simulator"};
  app.require_subcommand(1);
  // Config lives on the root app (subcommand-level config files are never
  // processed); fallthrough is set before the subcommands are created so they
  // inherit it and hand --config back up when it follows the subcommand name.
  app.fallthrough();
  app.set_config("--config", "",
                 "TOML config file: one [subcommand] section, keys are the long option names");
  app.allow_config_extras(CLI::config_extras_mode::error);

  int rc = 0;

  // generate
  auto gen_flags = std::make_shared<GenFlags>();
  auto gen_out = std::make_shared<std::string>("scenario.json");
  CLI::App* generate = app.add_subcommand("generate", "generate a scenario file");
  generate->add_option("--seed", gen_flags->cfg.seed, "generator seed")->capture_default_str();
  add_gen_options(generate, *gen_flags);
  generate->add_option("--out", *gen_out, "output scenario path")->capture_default_str();
  generate->callback([&rc, gen_flags, gen_out] { rc = do_generate(*gen_flags, *gen_out); });

  // run
  auto run_algo = std::make_shared<std::string>("masl");
  auto run_masl = std::make_shared<MaslFlags>();
  auto run_bcfg = std::make_shared<BaselineConfig>();
  auto run_scenario = std::make_shared<std::string>();
  auto run_out = std::make_shared<std::string>(".");
  CLI::App* run = app.add_subcommand("run", "run an algorithm on a scenario");
  run->add_option("--algo", *run_algo, "algorithm: masl|br|mxfp|selfish|raro")
      ->capture_default_str()
      ->check(CLI::IsMember({"masl", "br", "mxfp", "selfish", "raro"}));
  run->add_option("--scenario", *run_scenario, "scenario file")->required();
  run->add_option("--out", *run_out, "output directory")->capture_default_str();
  run->add_option("--seed", run_masl->cfg.seed, "algorithm seed")->capture_default_str();
  add_masl_options(run, *run_masl);
  run->add_option("--baseline-rounds", run_bcfg->max_rounds,
                  "round budget for br/mxfp baselines")
      ->capture_default_str();
  run->add_option("--baseline-tolerance", run_bcfg->tolerance,
                  "stabilization tolerance for br/mxfp baselines")
      ->capture_default_str();
  run->callback([&rc, run_algo, run_masl, run_bcfg, run_scenario, run_out] {
    rc = do_run(*run_algo, *run_masl, *run_bcfg, *run_scenario, *run_out);
  });

  // verify
  auto verify_cfg = std::make_shared<VerifyConfig>();
  auto verify_suite = std::make_shared<std::string>("all");
  auto verify_out = std::make_shared<std::string>();
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", *verify_suite, "sign-property|expectation|ne|all")
      ->capture_default_str()
      ->check(CLI::IsMember({"sign-property", "expectation", "ne", "all"}));
  verify->add_option("--trials", verify_cfg->trials, "sign-property deviations per view")
      ->capture_default_str();
  verify->add_option("--instances", verify_cfg->instances, "random instances per suite")
      ->capture_default_str();
  verify->add_option("--seed", verify_cfg->seed, "suite seed")->capture_default_str();
  verify->add_option("--out", *verify_out, "also write the JSON report here");
  verify->callback([&rc, verify_cfg, verify_suite, verify_out] {
    rc = do_verify(*verify_suite, *verify_cfg, *verify_out);
  });

  // sweep
  auto sweep_flags = std::make_shared<SweepFlags>();
  auto sweep_gen = std::make_shared<GenFlags>();
  auto sweep_masl = std::make_shared<MaslFlags>();
  auto sweep_out = std::make_shared<std::string>(".");
  CLI::App* sweep = app.add_subcommand("sweep", "sweep one scenario knob over seeds");
  sweep->add_option("--param", sweep_flags->param,
                    "num_aps|ap_bandwidth|num_es|es_capacity|flops_per_step|num_ues|"
                    "data_volume")
      ->capture_default_str();
  sweep->add_option("--values", sweep_flags->values, "swept values")->required();
  sweep->add_option("--seeds", sweep_flags->seeds, "explicit seed list");
  sweep->add_option("--num-seeds", sweep_flags->num_seeds,
                    "seed count (0..n-1) when --seeds is absent")
      ->capture_default_str();
  sweep->add_option("--algos", sweep_flags->algos, "algorithms: masl|br|mxfp|selfish|raro")
      ->capture_default_str();
  sweep->add_option("--baseline-tolerance", sweep_flags->baseline_tolerance,
                    "best-response improvement / mxFP stabilization threshold")
      ->capture_default_str();
  sweep->add_option("--baseline-rounds", sweep_flags->baseline_rounds,
                    "baseline round budget")
      ->capture_default_str();
  sweep->add_option("--out", *sweep_out, "output directory")->capture_default_str();
  add_gen_options(sweep, *sweep_gen);
  add_masl_options(sweep, *sweep_masl);
  sweep->callback([&rc, sweep_flags, sweep_gen, sweep_masl, sweep_out] {
    rc = do_sweep(*sweep_flags, *sweep_gen, *sweep_masl, *sweep_out);
  });

  // report
  auto report_in = std::make_shared<std::string>(".");
  auto report_expect = std::make_shared<std::string>();
  auto report_algo = std::make_shared<std::string>("masl");
  auto report_tol = std::make_shared<double>(0.05);
  CLI::App* report = app.add_subcommand("report", "summarize sweep outputs");
  report->add_option("--in", *report_in, "directory holding aggregate.json")
      ->capture_default_str();
  report->add_option("--expect", *report_expect,
                     "assert a trend of the mean objective: decreasing|increasing")
      ->check(CLI::IsMember({"decreasing", "increasing"}));
  report->add_option("--algo", *report_algo, "algorithm the trend applies to")
      ->capture_default_str();
  report->add_option("--tolerance", *report_tol, "relative noise tolerance")
      ->capture_default_str();
  report->callback([&rc, report_in, report_expect, report_algo, report_tol] {
    rc = do_report(*report_in, *report_expect, *report_algo, *report_tol);
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc) - 1 : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace jcaco
