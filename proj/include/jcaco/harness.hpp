#pragma once

// Experiment harness: parameter sweeps over scenario knobs, seed-replicated
// runs of the learner and the baselines, deterministic CSV/JSON outputs, and
// monotone trend checks over seed-averaged objectives.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jcaco/baselines.hpp"
#include "jcaco/masl.hpp"
#include "jcaco/scenario.hpp"

namespace jcaco {

enum class Algo { masl, br, mxfp, selfish, raro };

std::string algo_name(Algo a);
Algo algo_from_name(const std::string& name);

// Swept scenario knobs and the unit their sweep values are expressed in.
enum class SweepParam {
  num_aps,        // count
  ap_bandwidth,   // MHz, pins every AP
  num_es,         // count
  es_capacity,    // TFLOPs/s, pins every server
  flops_per_step, // TFLOPs/step, pins every server
  num_ues,        // count
  data_volume,    // MB, pins every UE
};

std::string sweep_param_name(SweepParam p);
SweepParam sweep_param_from_name(const std::string& name);

// Returns base with one knob overridden to `value` (count params truncate to
// int and must be >= 1; continuous params collapse the range to [v, v]).
GenConfig apply_sweep_value(const GenConfig& base, SweepParam param, double value);

struct SweepSpec {
  SweepParam param = SweepParam::num_aps;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::vector<Algo> algorithms{Algo::masl};
  GenConfig base;
  JcacoConfig masl;
  BaselineConfig baseline;
};

// One run = (algorithm, swept value, seed). The scenario is generated from
// base + value with the run's seed, and the same seed drives the algorithm.
struct RunRow {
  Algo algo = Algo::masl;
  SweepParam param = SweepParam::num_aps;
  double value = 0.0;
  std::uint64_t seed = 0;
  bool converged = false;
  int iterations = 0;
  double objective_s = 0.0;  // expected system delay of the final profile
};

struct AggregateCell {
  int total = 0;
  int converged = 0;
  double mean_objective_s = 0.0;   // over converged runs only
  double stddev_objective_s = 0.0;
  double mean_iterations = 0.0;
};

struct SweepResult {
  std::vector<RunRow> rows;  // sorted by (algorithm, value, seed)
  std::map<std::pair<std::string, double>, AggregateCell> aggregate;  // (algo, value)
};

// Executes every (algorithm, value, seed) combination on the worker budget
// (JCACO_WORKERS caps it) and, when out_dir is non-empty, writes runs.csv and
// aggregate.json there atomically. Identical spec -> byte-identical files.
SweepResult run_sweep(const SweepSpec& spec, const std::string& out_dir);

std::string sweep_rows_csv(const std::vector<RunRow>& rows);
std::string aggregate_json(const SweepResult& result);

enum class Trend { decreasing, increasing };

struct TrendReport {
  bool pass = false;
  std::string evidence;  // the mean series and any violated comparison
};

// Checks seed-averaged objectives against an expected direction. Adjacent
// means may move against the trend by at most noise_tolerance (relative), and
// the series must net-move in the expected direction by more than
// noise_tolerance overall, so a flat series fails even at tolerance 0.
TrendReport trend_check(const std::vector<double>& means, Trend expected,
                        double noise_tolerance);

// Convenience: extracts the mean series of one algorithm (values in ascending
// order) from a sweep result and runs trend_check.
TrendReport trend_check(const SweepResult& result, Algo algo, Trend expected,
                        double noise_tolerance);

// Runs one algorithm on one scenario (seed also drives the algorithm).
RunRow run_single(const Scenario& scenario, Algo algo, const JcacoConfig& masl_cfg,
                  const BaselineConfig& baseline_cfg, std::uint64_t seed);

}  // namespace jcaco
