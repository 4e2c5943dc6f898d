#include "jcaco/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "jcaco/rng.hpp"

namespace jcaco {
namespace {

std::string idx(const std::string& base, std::size_t i, const std::string& field) {
  return base + "[" + std::to_string(i) + "]." + field;
}

void check_positive(std::vector<Violation>& out, const std::string& path, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) out.push_back({path, "must be positive and finite"});
}

void check_position(std::vector<Violation>& out, const std::string& path, const Vec2& p,
                    double side) {
  if (!(p.x >= 0.0 && p.x <= side) || !(p.y >= 0.0 && p.y <= side))
    out.push_back({path, "outside the deployment area"});
}

constexpr double kProbQuantum = 1e-3;

bool quantized(double p) {
  double scaled = p / kProbQuantum;
  return std::abs(scaled - std::round(scaled)) < 1e-9;
}

}  // namespace

double quantize_probability(double p) {
  double q = std::ceil(p / kProbQuantum - 1e-9) * kProbQuantum;
  return std::clamp(q, kProbQuantum, 1.0);
}

ValidationReport validate(const Scenario& s) {
  ValidationReport report;
  auto& v = report.violations;

  if (s.aps.empty()) v.push_back({"aps", "at least one access point required"});
  if (s.servers.empty()) v.push_back({"servers", "at least one edge server required"});
  if (s.ues.empty()) v.push_back({"ues", "at least one user equipment required"});

  const double side = s.physics.area_side_m;
  check_positive(v, "physics.area_side_m", side);
  check_positive(v, "physics.path_loss_exponent", s.physics.path_loss_exponent);
  if (!std::isfinite(s.physics.noise_psd_dbm_per_hz))
    v.push_back({"physics.noise_psd_dbm_per_hz", "must be finite"});

  for (std::size_t m = 0; m < s.aps.size(); ++m) {
    const auto& ap = s.aps[m];
    if (ap.id != static_cast<int>(m)) v.push_back({idx("aps", m, "id"), "must equal its index"});
    check_positive(v, idx("aps", m, "bandwidth_hz"), ap.bandwidth_hz);
    check_position(v, idx("aps", m, "position"), ap.position, side);
  }

  for (std::size_t k = 0; k < s.servers.size(); ++k) {
    const auto& es = s.servers[k];
    if (es.id != static_cast<int>(k))
      v.push_back({idx("servers", k, "id"), "must equal its index"});
    check_positive(v, idx("servers", k, "flops_per_sec"), es.flops_per_sec);
    check_positive(v, idx("servers", k, "flops_per_step"), es.flops_per_step);
    check_positive(v, idx("servers", k, "forward_error_scale"), es.forward_error_scale);
  }

  for (std::size_t n = 0; n < s.ues.size(); ++n) {
    const auto& ue = s.ues[n];
    if (ue.id != static_cast<int>(n)) v.push_back({idx("ues", n, "id"), "must equal its index"});
    check_position(v, idx("ues", n, "position"), ue.position, side);
    check_positive(v, idx("ues", n, "data_size_bits"), ue.data_size_bits);
    if (!(ue.active_prob > 0.0 && ue.active_prob <= 1.0))
      v.push_back({idx("ues", n, "active_prob"), "must be in (0, 1]"});
    else if (!quantized(ue.active_prob))
      v.push_back({idx("ues", n, "active_prob"), "must be a multiple of 1e-3"});
    check_positive(v, idx("ues", n, "error_threshold"), ue.error_threshold);
    if (ue.fitness.size() != s.servers.size())
      v.push_back({idx("ues", n, "fitness"), "needs one entry per edge server"});
    else
      for (std::size_t k = 0; k < ue.fitness.size(); ++k)
        check_positive(v, idx("ues", n, "fitness") + "[" + std::to_string(k) + "]",
                       ue.fitness[k]);
    if (ue.tx_power_watts.size() != s.aps.size())
      v.push_back({idx("ues", n, "tx_power_watts"), "needs one entry per access point"});
    else
      for (std::size_t m = 0; m < ue.tx_power_watts.size(); ++m)
        check_positive(v, idx("ues", n, "tx_power_watts") + "[" + std::to_string(m) + "]",
                       ue.tx_power_watts[m]);
  }

  const auto& g = s.game;
  check_positive(v, "game.comm_time_granularity_s", g.comm_time_granularity_s);
  check_positive(v, "game.comp_time_granularity_s", g.comp_time_granularity_s);
  if (g.min_inference_steps < 1)
    v.push_back({"game.min_inference_steps", "must be at least 1"});
  // Compare in the log domain: the base itself can be astronomically large.
  if (!(g.potential_base_comm > 1.0) || !std::isfinite(g.potential_base_comm) ||
      (g.comm_time_granularity_s > 0.0 &&
       std::log2(g.potential_base_comm) + 1e-9 < 1.0 / g.comm_time_granularity_s))
    v.push_back({"game.potential_base_comm",
                 "needs log2(base) >= 1 / comm_time_granularity_s"});
  if (!(g.potential_base_comp > 1.0) || !std::isfinite(g.potential_base_comp) ||
      (g.comp_time_granularity_s > 0.0 &&
       std::log2(g.potential_base_comp) + 1e-9 < 1.0 / g.comp_time_granularity_s))
    v.push_back({"game.potential_base_comp",
                 "needs log2(base) >= 1 / comp_time_granularity_s"});

  return report;
}

std::vector<Vec2> ap_grid_positions(int num_aps, double area_side_m) {
  // ceil(sqrt(M)) columns, row-major placement at cell centers.
  int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_aps))));
  int rows = (num_aps + cols - 1) / cols;
  double cell_w = area_side_m / cols;
  double cell_h = area_side_m / rows;
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(num_aps));
  for (int i = 0; i < num_aps; ++i) {
    int c = i % cols;
    int r = i / cols;
    out.push_back({(c + 0.5) * cell_w, (r + 0.5) * cell_h});
  }
  return out;
}

namespace {

void require_range(const Range& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw std::invalid_argument(std::string("generate_scenario: inverted or non-finite range ") +
                                name);
}

}  // namespace

Scenario generate_scenario(const GenConfig& cfg) {
  if (cfg.num_aps < 1 || cfg.num_servers < 1 || cfg.num_ues < 1)
    throw std::invalid_argument("generate_scenario: counts must be at least 1");
  if (!(cfg.area_side_m > 0.0))
    throw std::invalid_argument("generate_scenario: area_side_m must be positive");
  require_range(cfg.bandwidth_hz, "bandwidth_hz");
  require_range(cfg.flops_per_sec, "flops_per_sec");
  require_range(cfg.flops_per_step, "flops_per_step");
  require_range(cfg.forward_error_scale, "forward_error_scale");
  require_range(cfg.data_size_mb, "data_size_mb");
  require_range(cfg.active_prob, "active_prob");
  require_range(cfg.error_threshold, "error_threshold");
  require_range(cfg.fitness, "fitness");
  require_range(cfg.tx_power_watts, "tx_power_watts");

  RngStream rng = RngStream::from(cfg.seed, {stream_label::kScenarioDraw});

  Scenario s;
  s.physics.area_side_m = cfg.area_side_m;
  s.physics.path_loss_exponent = cfg.path_loss_exponent;
  s.physics.noise_psd_dbm_per_hz = cfg.noise_psd_dbm_per_hz;
  s.physics.rayleigh_enabled = cfg.rayleigh_enabled;
  s.game.comm_time_granularity_s = cfg.comm_time_granularity_s;
  s.game.comp_time_granularity_s = cfg.comp_time_granularity_s;
  s.game.min_inference_steps = cfg.min_inference_steps;
  s.game.potential_base_comm = std::exp2(1.0 / cfg.comm_time_granularity_s);
  s.game.potential_base_comp = std::exp2(1.0 / cfg.comp_time_granularity_s);

  auto grid = ap_grid_positions(cfg.num_aps, cfg.area_side_m);
  for (int m = 0; m < cfg.num_aps; ++m) {
    AccessPoint ap;
    ap.id = m;
    ap.position = grid[static_cast<std::size_t>(m)];
    ap.bandwidth_hz = rng.uniform(cfg.bandwidth_hz.lo, cfg.bandwidth_hz.hi);
    s.aps.push_back(ap);
  }

  for (int k = 0; k < cfg.num_servers; ++k) {
    EdgeServer es;
    es.id = k;
    es.flops_per_sec = rng.uniform(cfg.flops_per_sec.lo, cfg.flops_per_sec.hi);
    es.flops_per_step = rng.uniform(cfg.flops_per_step.lo, cfg.flops_per_step.hi);
    es.forward_error_scale =
        rng.uniform(cfg.forward_error_scale.lo, cfg.forward_error_scale.hi);
    s.servers.push_back(es);
  }

  for (int n = 0; n < cfg.num_ues; ++n) {
    UserEquipment ue;
    ue.id = n;
    ue.position = {rng.uniform(0.0, cfg.area_side_m), rng.uniform(0.0, cfg.area_side_m)};
    ue.data_size_bits =
        rng.uniform(cfg.data_size_mb.lo, cfg.data_size_mb.hi) * kBitsPerMegabyte;
    ue.active_prob = quantize_probability(rng.uniform(cfg.active_prob.lo, cfg.active_prob.hi));
    ue.error_threshold = rng.uniform(cfg.error_threshold.lo, cfg.error_threshold.hi);
    ue.fitness.reserve(static_cast<std::size_t>(cfg.num_servers));
    for (int k = 0; k < cfg.num_servers; ++k)
      ue.fitness.push_back(rng.uniform(cfg.fitness.lo, cfg.fitness.hi));
    ue.tx_power_watts.reserve(static_cast<std::size_t>(cfg.num_aps));
    for (int m = 0; m < cfg.num_aps; ++m)
      ue.tx_power_watts.push_back(rng.uniform(cfg.tx_power_watts.lo, cfg.tx_power_watts.hi));
    s.ues.push_back(ue);
  }

  return s;
}

}  // namespace jcaco
