#pragma once

// Domain model for an edge deployment: access points, edge servers hosting a
// generative inference service, and user equipments with stochastic activity.
// Also holds the physics and game constants shared by every downstream module,
// plus validation and the seeded scenario generator.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace jcaco {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

struct AccessPoint {
  int id = 0;
  Vec2 position;
  double bandwidth_hz = 0.0;  // W_m
  bool operator==(const AccessPoint&) const = default;
};

// Compute rates are in TFLOPs so that flops_per_step / flops_per_sec is
// directly a per-step service time in seconds.
struct EdgeServer {
  int id = 0;
  double flops_per_sec = 0.0;        // f_k, TFLOPs/s
  double flops_per_step = 0.0;       // xi_k, TFLOPs per inference step
  double forward_error_scale = 0.0;  // per-step error scale of the hosted model
  bool operator==(const EdgeServer&) const = default;
};

struct UserEquipment {
  int id = 0;
  Vec2 position;
  double data_size_bits = 0.0;      // D_n, task payload in bits
  double active_prob = 0.0;         // p_n in (0, 1], quantized to 1e-3
  double error_threshold = 0.0;     // maximum acceptable inference error
  std::vector<double> fitness;      // gamma_nk > 0, one entry per edge server
  std::vector<double> tx_power_watts;  // rho_nm > 0, one entry per access point
  bool operator==(const UserEquipment&) const = default;
};

struct PhysicsConstants {
  double path_loss_exponent = 4.0;        // theta
  double noise_psd_dbm_per_hz = -174.0;   // N0
  bool rayleigh_enabled = false;          // multiply gains by Exp(1) fading
  double area_side_m = 1000.0;            // square deployment area
  bool operator==(const PhysicsConstants&) const = default;
};

struct GameConstants {
  double comm_time_granularity_s = 1e-3;  // minimum meaningful access-delay difference
  double comp_time_granularity_s = 1e-3;  // minimum meaningful compute-delay difference
  // Potential bases; validity of the potential argument requires
  // log2(base) >= 1/granularity. The defaults are exactly 2^1000, which is
  // representable as a double but must only ever be exponentiated in the log
  // domain (see the game engine).
  double potential_base_comm = std::exp2(1000.0);
  double potential_base_comp = std::exp2(1000.0);
  int min_inference_steps = 1;
  bool operator==(const GameConstants&) const = default;
};

struct Scenario {
  std::vector<AccessPoint> aps;
  std::vector<EdgeServer> servers;
  std::vector<UserEquipment> ues;
  PhysicsConstants physics;
  GameConstants game;

  int num_aps() const { return static_cast<int>(aps.size()); }
  int num_servers() const { return static_cast<int>(servers.size()); }
  int num_ues() const { return static_cast<int>(ues.size()); }

  bool operator==(const Scenario&) const = default;
};

// One structural or range violation found by validate(), e.g.
// {"ues[3].active_prob", "must be in (0, 1]"}.
struct Violation {
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks all invariants the rest of the library assumes: non-empty entity
// lists, ids equal to indices, positive physical quantities, probabilities
// quantized in (0, 1], per-UE vector lengths matching M and K, positions
// inside the area, and potential bases large enough for the granularity.
ValidationReport validate(const Scenario& s);

// Rounds p up to the 1e-3 grid and clamps into (0, 1].
double quantize_probability(double p);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Generation config. Ranges are sampled uniformly; a collapsed range
// (lo == hi) pins the value, which is how parameter sweeps fix one knob.
struct GenConfig {
  int num_aps = 5;
  int num_servers = 5;
  int num_ues = 30;
  std::uint64_t seed = 0;

  double area_side_m = 1000.0;
  Range bandwidth_hz{2e6, 10e6};
  Range flops_per_sec{2.0, 10.0};        // TFLOPs/s
  Range flops_per_step{0.1, 0.5};        // TFLOPs/step
  Range forward_error_scale{1.0, 2.0};
  Range data_size_mb{2.0, 10.0};         // converted to bits (1 MB = 8e6 bits)
  Range active_prob{0.0, 1.0};           // quantized into (0, 1]
  Range error_threshold{0.05, 0.2};
  Range fitness{0.05, 0.2};
  Range tx_power_watts{0.2, 0.2};

  double path_loss_exponent = 4.0;
  double noise_psd_dbm_per_hz = -174.0;
  bool rayleigh_enabled = false;

  double comm_time_granularity_s = 1e-3;
  double comp_time_granularity_s = 1e-3;
  int min_inference_steps = 1;
};

inline constexpr double kBitsPerMegabyte = 8e6;

// Deterministic scenario generator: access points on a uniform grid over the
// square area (ceil(sqrt(M)) columns, placed row-major at cell centers), UEs
// uniformly at random, all scalar parameters drawn from the config ranges.
// Same config (including seed) always produces an identical scenario.
// Throws std::invalid_argument on non-positive counts or inverted ranges.
Scenario generate_scenario(const GenConfig& cfg);

// Grid positions used by the generator, exposed for tests.
std::vector<Vec2> ap_grid_positions(int num_aps, double area_side_m);

}  // namespace jcaco
