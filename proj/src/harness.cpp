#include "jcaco/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "jcaco/env.hpp"
#include "jcaco/util.hpp"

namespace jcaco {

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::masl: return "masl";
    case Algo::br: return "br";
    case Algo::mxfp: return "mxfp";
    case Algo::selfish: return "selfish";
    case Algo::raro: return "raro";
  }
  throw std::invalid_argument("algo_name: unknown algorithm");
}

Algo algo_from_name(const std::string& name) {
  if (name == "masl") return Algo::masl;
  if (name == "br") return Algo::br;
  if (name == "mxfp") return Algo::mxfp;
  if (name == "selfish") return Algo::selfish;
  if (name == "raro") return Algo::raro;
  throw std::invalid_argument("unknown algorithm name: " + name);
}

std::string sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::num_aps: return "num_aps";
    case SweepParam::ap_bandwidth: return "ap_bandwidth";
    case SweepParam::num_es: return "num_es";
    case SweepParam::es_capacity: return "es_capacity";
    case SweepParam::flops_per_step: return "flops_per_step";
    case SweepParam::num_ues: return "num_ues";
    case SweepParam::data_volume: return "data_volume";
  }
  throw std::invalid_argument("sweep_param_name: unknown parameter");
}

SweepParam sweep_param_from_name(const std::string& name) {
  if (name == "num_aps") return SweepParam::num_aps;
  if (name == "ap_bandwidth") return SweepParam::ap_bandwidth;
  if (name == "num_es") return SweepParam::num_es;
  if (name == "es_capacity") return SweepParam::es_capacity;
  if (name == "flops_per_step") return SweepParam::flops_per_step;
  if (name == "num_ues") return SweepParam::num_ues;
  if (name == "data_volume") return SweepParam::data_volume;
  throw std::invalid_argument("unknown sweep parameter: " + name);
}

GenConfig apply_sweep_value(const GenConfig& base, SweepParam param, double value) {
  GenConfig cfg = base;
  auto as_count = [&](const char* what) {
    int v = static_cast<int>(value);
    if (v < 1)
      throw std::invalid_argument(std::string("sweep value for ") + what + " must be >= 1");
    return v;
  };
  auto as_positive = [&](const char* what) {
    if (!(value > 0.0))
      throw std::invalid_argument(std::string("sweep value for ") + what +
                                  " must be positive");
    return value;
  };
  switch (param) {
    case SweepParam::num_aps: cfg.num_aps = as_count("num_aps"); break;
    case SweepParam::ap_bandwidth: {
      double hz = as_positive("ap_bandwidth") * 1e6;
      cfg.bandwidth_hz = Range{hz, hz};
      break;
    }
    case SweepParam::num_es: cfg.num_servers = as_count("num_es"); break;
    case SweepParam::es_capacity: {
      double f = as_positive("es_capacity");
      cfg.flops_per_sec = Range{f, f};
      break;
    }
    case SweepParam::flops_per_step: {
      double xi = as_positive("flops_per_step");
      cfg.flops_per_step = Range{xi, xi};
      break;
    }
    case SweepParam::num_ues: cfg.num_ues = as_count("num_ues"); break;
    case SweepParam::data_volume: {
      double mb = as_positive("data_volume");
      cfg.data_size_mb = Range{mb, mb};
      break;
    }
  }
  return cfg;
}

RunRow run_single(const Scenario& scenario, Algo algo, const JcacoConfig& masl_cfg,
                  const BaselineConfig& baseline_cfg, std::uint64_t seed) {
  RunRow row;
  row.algo = algo;
  row.seed = seed;
  UnitTimes times = compute_unit_times(scenario, deterministic_channel(scenario,
                                                                       ue_positions(scenario)));
  switch (algo) {
    case Algo::masl: {
      JcacoConfig cfg = masl_cfg;
      cfg.seed = seed;
      cfg.record_trace = false;  // sweeps keep only the summary row
      JcacoResult res = run_jcaco(scenario, cfg);
      row.converged = res.converged;
      row.iterations = res.access.iterations + res.compute.iterations;
      row.objective_s = res.final_objective_s;
      break;
    }
    case Algo::br: {
      BaselineConfig cfg = baseline_cfg;
      cfg.seed = seed;
      GameView view = make_stochastic_view(scenario, times, PayoffKind::total);
      BestResponseResult res = run_best_response(scenario, times, view, cfg);
      row.converged = res.converged;
      row.iterations = res.rounds;
      row.objective_s = system_expected_total_s(scenario, times, res.profile);
      break;
    }
    case Algo::mxfp: {
      BaselineConfig cfg = baseline_cfg;
      cfg.seed = seed;
      MxfpResult res = run_mxfp(scenario, times, cfg);
      row.converged = res.converged;
      row.iterations = res.rounds;
      row.objective_s = system_expected_total_s(scenario, times, res.profile);
      break;
    }
    case Algo::selfish: {
      StrategyProfile prof = run_selfish(scenario, times);
      row.converged = true;
      row.iterations = 1;
      row.objective_s = system_expected_total_s(scenario, times, prof);
      break;
    }
    case Algo::raro: {
      StrategyProfile prof = run_raro(scenario, times, seed);
      row.converged = true;
      row.iterations = 1;
      row.objective_s = system_expected_total_s(scenario, times, prof);
      break;
    }
  }
  return row;
}

SweepResult run_sweep(const SweepSpec& spec, const std::string& out_dir) {
  if (spec.values.empty()) throw std::invalid_argument("run_sweep: no sweep values");
  if (spec.seeds.empty()) throw std::invalid_argument("run_sweep: no seeds");
  if (spec.algorithms.empty()) throw std::invalid_argument("run_sweep: no algorithms");

  struct Combo {
    Algo algo;
    double value;
    std::uint64_t seed;
  };
  std::vector<Combo> combos;
  combos.reserve(spec.algorithms.size() * spec.values.size() * spec.seeds.size());
  for (Algo a : spec.algorithms)
    for (double v : spec.values)
      for (std::uint64_t s : spec.seeds) combos.push_back(Combo{a, v, s});

  SweepResult result;
  result.rows.resize(combos.size());
  parallel_for(combos.size(), [&](std::size_t i) {
    const Combo& c = combos[i];
    GenConfig gen = apply_sweep_value(spec.base, spec.param, c.value);
    gen.seed = c.seed;
    Scenario scenario = generate_scenario(gen);
    RunRow row = run_single(scenario, c.algo, spec.masl, spec.baseline, c.seed);
    row.param = spec.param;
    row.value = c.value;
    result.rows[i] = row;
  });

  std::sort(result.rows.begin(), result.rows.end(), [](const RunRow& a, const RunRow& b) {
    if (a.algo != b.algo) return static_cast<int>(a.algo) < static_cast<int>(b.algo);
    if (a.value != b.value) return a.value < b.value;
    return a.seed < b.seed;
  });

  for (const RunRow& row : result.rows) {
    AggregateCell& cell = result.aggregate[{algo_name(row.algo), row.value}];
    cell.total += 1;
    if (row.converged) cell.converged += 1;
  }
  for (auto& [key, cell] : result.aggregate) {
    double sum = 0.0, sum_sq = 0.0, iter_sum = 0.0;
    for (const RunRow& row : result.rows) {
      if (algo_name(row.algo) != key.first || row.value != key.second) continue;
      iter_sum += static_cast<double>(row.iterations);
      if (!row.converged) continue;
      sum += row.objective_s;
      sum_sq += row.objective_s * row.objective_s;
    }
    cell.mean_iterations = iter_sum / static_cast<double>(cell.total);
    if (cell.converged > 0) {
      double n = static_cast<double>(cell.converged);
      cell.mean_objective_s = sum / n;
      if (cell.converged > 1) {
        double var = (sum_sq - sum * sum / n) / (n - 1.0);
        cell.stddev_objective_s = std::sqrt(std::max(0.0, var));
      }
    }
  }

  if (!out_dir.empty()) {
    write_file_atomic(out_dir + "/runs.csv", sweep_rows_csv(result.rows));
    write_file_atomic(out_dir + "/aggregate.json", aggregate_json(result));
  }
  return result;
}

std::string sweep_rows_csv(const std::vector<RunRow>& rows) {
  std::string out = "algorithm,param,value,seed,converged,iterations,objective_s\n";
  for (const RunRow& r : rows) {
    out += algo_name(r.algo);
    out += ',';
    out += sweep_param_name(r.param);
    out += ',';
    out += format_double(r.value);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.converged ? "true" : "false";
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += format_double(r.objective_s);
    out += '\n';
  }
  return out;
}

std::string aggregate_json(const SweepResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  std::string param =
      result.rows.empty() ? std::string() : sweep_param_name(result.rows.front().param);
  for (const auto& [key, cell] : result.aggregate) {
    nlohmann::json c;
    c["algorithm"] = key.first;
    c["value"] = key.second;
    c["total"] = cell.total;
    c["converged"] = cell.converged;
    c["mean_objective_s"] = cell.mean_objective_s;
    c["stddev_objective_s"] = cell.stddev_objective_s;
    c["mean_iterations"] = cell.mean_iterations;
    cells.push_back(std::move(c));
  }
  nlohmann::json root;
  root["schema_version"] = 1;
  root["param"] = param;
  root["cells"] = std::move(cells);
  return root.dump(2) + "\n";
}

TrendReport trend_check(const std::vector<double>& means, Trend expected,
                        double noise_tolerance) {
  if (noise_tolerance < 0.0)
    throw std::invalid_argument("trend_check: noise_tolerance must be non-negative");
  TrendReport report;
  std::ostringstream evidence;
  evidence << "means=[";
  for (std::size_t i = 0; i < means.size(); ++i)
    evidence << (i ? ", " : "") << format_double(means[i]);
  evidence << "]";
  if (means.size() < 2) {
    report.evidence = evidence.str() + "; need at least two means";
    return report;
  }
  bool ok = true;
  const bool down = expected == Trend::decreasing;
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    // Adjacent means may move against the trend by the relative tolerance.
    bool pair_ok = down ? means[i + 1] <= means[i] * (1.0 + noise_tolerance)
                        : means[i + 1] >= means[i] * (1.0 - noise_tolerance);
    if (!pair_ok) {
      ok = false;
      evidence << "; step " << i << "->" << i + 1 << " moves against the trend beyond tolerance";
    }
  }
  // The series must net-move in the expected direction, so flat fails.
  bool net_ok = down ? means.back() < means.front() * (1.0 - noise_tolerance)
                     : means.back() > means.front() * (1.0 + noise_tolerance);
  if (!net_ok) {
    ok = false;
    evidence << "; no net " << (down ? "decrease" : "increase") << " beyond tolerance";
  }
  report.pass = ok;
  report.evidence = evidence.str();
  return report;
}

TrendReport trend_check(const SweepResult& result, Algo algo, Trend expected,
                        double noise_tolerance) {
  std::vector<double> means;
  const std::string name = algo_name(algo);
  for (const auto& [key, cell] : result.aggregate) {
    if (key.first != name) continue;  // map order gives ascending values
    if (cell.converged == 0) {
      TrendReport report;
      report.evidence = "no converged runs for " + name + " at value " +
                        format_double(key.second);
      return report;
    }
    means.push_back(cell.mean_objective_s);
  }
  if (means.empty()) {
    TrendReport report;
    report.evidence = "no aggregate cells for " + name;
    return report;
  }
  return trend_check(means, expected, noise_tolerance);
}

}  // namespace jcaco
