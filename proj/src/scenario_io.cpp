#include "jcaco/scenario_io.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jcaco/util.hpp"
#include "json.hpp"

namespace jcaco {
namespace {

using nlohmann::json;

json vec2_to_json(const Vec2& v) { return json{{"x", v.x}, {"y", v.y}}; }

// Typed field access with error messages that name the offending key.
template <typename T>
T get_field(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key))
    throw std::invalid_argument("scenario: missing key " + where + "." + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("scenario: bad value for " + where + "." + key);
  }
}

Vec2 vec2_from_json(const json& j, const std::string& where) {
  return {get_field<double>(j, where, "x"), get_field<double>(j, where, "y")};
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_double(std::vector<std::uint8_t>& out, double v) {
  append_u64(out, std::bit_cast<std::uint64_t>(v));
}

}  // namespace

std::string encode_scenario_json(const Scenario& s) {
  json j;
  j["schema_version"] = 1;
  j["physics"] = {{"path_loss_exponent", s.physics.path_loss_exponent},
                  {"noise_psd_dbm_per_hz", s.physics.noise_psd_dbm_per_hz},
                  {"rayleigh_enabled", s.physics.rayleigh_enabled},
                  {"area_side_m", s.physics.area_side_m}};
  j["game"] = {{"comm_time_granularity_s", s.game.comm_time_granularity_s},
               {"comp_time_granularity_s", s.game.comp_time_granularity_s},
               {"potential_base_comm", s.game.potential_base_comm},
               {"potential_base_comp", s.game.potential_base_comp},
               {"min_inference_steps", s.game.min_inference_steps}};
  j["aps"] = json::array();
  for (const auto& ap : s.aps)
    j["aps"].push_back({{"id", ap.id},
                        {"position", vec2_to_json(ap.position)},
                        {"bandwidth_hz", ap.bandwidth_hz}});
  j["servers"] = json::array();
  for (const auto& es : s.servers)
    j["servers"].push_back({{"id", es.id},
                            {"flops_per_sec", es.flops_per_sec},
                            {"flops_per_step", es.flops_per_step},
                            {"forward_error_scale", es.forward_error_scale}});
  j["ues"] = json::array();
  for (const auto& ue : s.ues)
    j["ues"].push_back({{"id", ue.id},
                        {"position", vec2_to_json(ue.position)},
                        {"data_size_bits", ue.data_size_bits},
                        {"active_prob", ue.active_prob},
                        {"error_threshold", ue.error_threshold},
                        {"fitness", ue.fitness},
                        {"tx_power_watts", ue.tx_power_watts}});
  return j.dump(2) + "\n";
}

Scenario decode_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("scenario: top level must be an object");

  Scenario s;
  const json& ph = j.contains("physics") ? j.at("physics") : json::object();
  s.physics.path_loss_exponent = get_field<double>(ph, "physics", "path_loss_exponent");
  s.physics.noise_psd_dbm_per_hz = get_field<double>(ph, "physics", "noise_psd_dbm_per_hz");
  s.physics.rayleigh_enabled = get_field<bool>(ph, "physics", "rayleigh_enabled");
  s.physics.area_side_m = get_field<double>(ph, "physics", "area_side_m");

  const json& g = j.contains("game") ? j.at("game") : json::object();
  s.game.comm_time_granularity_s = get_field<double>(g, "game", "comm_time_granularity_s");
  s.game.comp_time_granularity_s = get_field<double>(g, "game", "comp_time_granularity_s");
  s.game.potential_base_comm = get_field<double>(g, "game", "potential_base_comm");
  s.game.potential_base_comp = get_field<double>(g, "game", "potential_base_comp");
  s.game.min_inference_steps = get_field<int>(g, "game", "min_inference_steps");

  if (!j.contains("aps") || !j.at("aps").is_array())
    throw std::invalid_argument("scenario: missing key aps (array)");
  for (std::size_t m = 0; m < j.at("aps").size(); ++m) {
    const json& a = j.at("aps")[m];
    std::string where = "aps[" + std::to_string(m) + "]";
    AccessPoint ap;
    ap.id = get_field<int>(a, where, "id");
    if (!a.contains("position"))
      throw std::invalid_argument("scenario: missing key " + where + ".position");
    ap.position = vec2_from_json(a.at("position"), where + ".position");
    ap.bandwidth_hz = get_field<double>(a, where, "bandwidth_hz");
    s.aps.push_back(ap);
  }

  if (!j.contains("servers") || !j.at("servers").is_array())
    throw std::invalid_argument("scenario: missing key servers (array)");
  for (std::size_t k = 0; k < j.at("servers").size(); ++k) {
    const json& e = j.at("servers")[k];
    std::string where = "servers[" + std::to_string(k) + "]";
    EdgeServer es;
    es.id = get_field<int>(e, where, "id");
    es.flops_per_sec = get_field<double>(e, where, "flops_per_sec");
    es.flops_per_step = get_field<double>(e, where, "flops_per_step");
    es.forward_error_scale = get_field<double>(e, where, "forward_error_scale");
    s.servers.push_back(es);
  }

  if (!j.contains("ues") || !j.at("ues").is_array())
    throw std::invalid_argument("scenario: missing key ues (array)");
  for (std::size_t n = 0; n < j.at("ues").size(); ++n) {
    const json& u = j.at("ues")[n];
    std::string where = "ues[" + std::to_string(n) + "]";
    UserEquipment ue;
    ue.id = get_field<int>(u, where, "id");
    if (!u.contains("position"))
      throw std::invalid_argument("scenario: missing key " + where + ".position");
    ue.position = vec2_from_json(u.at("position"), where + ".position");
    ue.data_size_bits = get_field<double>(u, where, "data_size_bits");
    ue.active_prob = get_field<double>(u, where, "active_prob");
    ue.error_threshold = get_field<double>(u, where, "error_threshold");
    ue.fitness = get_field<std::vector<double>>(u, where, "fitness");
    ue.tx_power_watts = get_field<std::vector<double>>(u, where, "tx_power_watts");
    s.ues.push_back(ue);
  }

  return s;
}

std::vector<std::uint8_t> encode_scenario_binary(const Scenario& s) {
  std::vector<std::uint8_t> out;
  out.push_back('J');
  out.push_back('C');
  out.push_back('S');
  out.push_back('1');
  append_u64(out, static_cast<std::uint64_t>(s.aps.size()));
  append_u64(out, static_cast<std::uint64_t>(s.servers.size()));
  append_u64(out, static_cast<std::uint64_t>(s.ues.size()));
  append_double(out, s.physics.path_loss_exponent);
  append_double(out, s.physics.noise_psd_dbm_per_hz);
  out.push_back(s.physics.rayleigh_enabled ? 1 : 0);
  append_double(out, s.physics.area_side_m);
  append_double(out, s.game.comm_time_granularity_s);
  append_double(out, s.game.comp_time_granularity_s);
  append_double(out, s.game.potential_base_comm);
  append_double(out, s.game.potential_base_comp);
  append_u64(out, static_cast<std::uint64_t>(s.game.min_inference_steps));
  for (const auto& ap : s.aps) {
    append_double(out, ap.position.x);
    append_double(out, ap.position.y);
    append_double(out, ap.bandwidth_hz);
  }
  for (const auto& es : s.servers) {
    append_double(out, es.flops_per_sec);
    append_double(out, es.flops_per_step);
    append_double(out, es.forward_error_scale);
  }
  for (const auto& ue : s.ues) {
    append_double(out, ue.position.x);
    append_double(out, ue.position.y);
    append_double(out, ue.data_size_bits);
    append_double(out, ue.active_prob);
    append_double(out, ue.error_threshold);
    for (double f : ue.fitness) append_double(out, f);
    for (double p : ue.tx_power_watts) append_double(out, p);
  }
  return out;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_scenario_json(buf.str());
}

void save_scenario_file(const Scenario& s, const std::string& path) {
  write_file_atomic(path, encode_scenario_json(s));
}

}  // namespace jcaco
