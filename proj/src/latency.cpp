#include "jcaco/latency.hpp"

#include <cmath>
#include <stdexcept>

namespace jcaco {

double noise_power_watts(double noise_psd_dbm_per_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("noise_power_watts: bandwidth must be positive");
  // dBm/Hz -> W/Hz (-30 dB for mW -> W), times the band.
  return std::pow(10.0, (noise_psd_dbm_per_hz - 30.0) / 10.0) * bandwidth_hz;
}

double channel_capacity_bps(double bandwidth_hz, double tx_power_w, double gain,
                            double noise_psd_dbm_per_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("channel_capacity: bandwidth must be positive");
  if (!(tx_power_w > 0.0)) throw std::domain_error("channel_capacity: tx power must be positive");
  if (!(gain > 0.0)) throw std::domain_error("channel_capacity: gain must be positive");
  double snr = tx_power_w * gain / noise_power_watts(noise_psd_dbm_per_hz, bandwidth_hz);
  return bandwidth_hz * std::log2(1.0 + snr);
}

double unit_tx_time_s(const Scenario& s, const ChannelRealization& ch, int ue, int ap) {
  const auto& u = s.ues[static_cast<std::size_t>(ue)];
  double rate = channel_capacity_bps(s.aps[static_cast<std::size_t>(ap)].bandwidth_hz,
                                     u.tx_power_watts[static_cast<std::size_t>(ap)],
                                     ch.gain(static_cast<std::size_t>(ue),
                                             static_cast<std::size_t>(ap)),
                                     s.physics.noise_psd_dbm_per_hz);
  if (!(rate > 0.0)) throw std::domain_error("unit_tx_time: zero channel capacity");
  return u.data_size_bits / rate;
}

double unit_compute_time_s(const EdgeServer& server, int steps) {
  if (steps < 1) throw std::domain_error("unit_compute_time: steps must be at least 1");
  return server.flops_per_step * static_cast<double>(steps) / server.flops_per_sec;
}

double aec(const Scenario& s, int ue, int server, int steps) {
  if (steps < 0) throw std::domain_error("aec: negative step count");
  const auto& u = s.ues[static_cast<std::size_t>(ue)];
  const auto& es = s.servers[static_cast<std::size_t>(server)];
  double gamma = u.fitness[static_cast<std::size_t>(server)];
  return es.forward_error_scale * std::exp(-gamma * static_cast<double>(steps));
}

int optimal_steps(const Scenario& s, int ue, int server, int min_steps) {
  if (min_steps < 1) throw std::invalid_argument("optimal_steps: min_steps must be at least 1");
  const auto& u = s.ues[static_cast<std::size_t>(ue)];
  const auto& es = s.servers[static_cast<std::size_t>(server)];
  if (!(u.error_threshold > 0.0)) throw std::domain_error("optimal_steps: threshold must be positive");
  double gamma = u.fitness[static_cast<std::size_t>(server)];
  if (!(gamma > 0.0)) throw std::domain_error("optimal_steps: fitness must be positive");
  // Smallest integer d with scale * exp(-gamma d) <= threshold, floored at
  // min_steps. The threshold at or above the scale is met by any step count.
  double raw = -std::log(u.error_threshold / es.forward_error_scale) / gamma;
  double needed = std::ceil(raw);
  if (!(needed >= static_cast<double>(min_steps))) return min_steps;
  return static_cast<int>(needed);
}

UnitTimes compute_unit_times(const Scenario& s, const ChannelRealization& ch) {
  const std::size_t n_ues = s.ues.size();
  const std::size_t n_aps = s.aps.size();
  const std::size_t n_es = s.servers.size();
  UnitTimes t;
  t.tx_s = Grid<double>(n_ues, n_aps);
  t.opt_steps = Grid<int>(n_ues, n_es);
  t.opt_compute_s = Grid<double>(n_ues, n_es);
  for (std::size_t n = 0; n < n_ues; ++n) {
    for (std::size_t m = 0; m < n_aps; ++m)
      t.tx_s(n, m) = unit_tx_time_s(s, ch, static_cast<int>(n), static_cast<int>(m));
    for (std::size_t k = 0; k < n_es; ++k) {
      int d = optimal_steps(s, static_cast<int>(n), static_cast<int>(k),
                            s.game.min_inference_steps);
      t.opt_steps(n, k) = d;
      t.opt_compute_s(n, k) = unit_compute_time_s(s.servers[k], d);
    }
  }
  return t;
}

std::vector<double> realized_ap_loads(const Scenario& s, const UnitTimes& t,
                                      const StrategyProfile& prof, const ActivityState& omega) {
  std::vector<double> load(s.aps.size(), 0.0);
  for (std::size_t n = 0; n < s.ues.size(); ++n) {
    if (!omega.active[n]) continue;
    load[static_cast<std::size_t>(prof.ap_choice[n])] += t.tx_s(n, static_cast<std::size_t>(prof.ap_choice[n]));
  }
  return load;
}

std::vector<double> expected_ap_loads(const Scenario& s, const UnitTimes& t,
                                      const StrategyProfile& prof) {
  std::vector<double> load(s.aps.size(), 0.0);
  for (std::size_t n = 0; n < s.ues.size(); ++n)
    load[static_cast<std::size_t>(prof.ap_choice[n])] +=
        s.ues[n].active_prob * t.tx_s(n, static_cast<std::size_t>(prof.ap_choice[n]));
  return load;
}

std::vector<double> realized_es_loads(const Scenario& s, const StrategyProfile& prof,
                                      const ActivityState& omega) {
  std::vector<double> load(s.servers.size(), 0.0);
  for (std::size_t n = 0; n < s.ues.size(); ++n) {
    if (!omega.active[n]) continue;
    auto k = static_cast<std::size_t>(prof.es_choice[n]);
    load[k] += unit_compute_time_s(s.servers[k], prof.steps[n]);
  }
  return load;
}

std::vector<double> expected_es_loads(const Scenario& s, const StrategyProfile& prof) {
  std::vector<double> load(s.servers.size(), 0.0);
  for (std::size_t n = 0; n < s.ues.size(); ++n) {
    auto k = static_cast<std::size_t>(prof.es_choice[n]);
    load[k] += s.ues[n].active_prob * unit_compute_time_s(s.servers[k], prof.steps[n]);
  }
  return load;
}

double conditional_access_delay_s(const Scenario& s, const UnitTimes& t,
                                  const StrategyProfile& prof, int ue) {
  auto u = static_cast<std::size_t>(ue);
  auto m = static_cast<std::size_t>(prof.ap_choice[u]);
  double delay = t.tx_s(u, m);  // own contribution at weight 1
  for (std::size_t n = 0; n < s.ues.size(); ++n) {
    if (n == u || static_cast<std::size_t>(prof.ap_choice[n]) != m) continue;
    delay += s.ues[n].active_prob * t.tx_s(n, m);
  }
  return delay;
}

double conditional_compute_delay_s(const Scenario& s, const StrategyProfile& prof, int ue) {
  auto u = static_cast<std::size_t>(ue);
  auto k = static_cast<std::size_t>(prof.es_choice[u]);
  double delay = unit_compute_time_s(s.servers[k], prof.steps[u]);
  for (std::size_t n = 0; n < s.ues.size(); ++n) {
    if (n == u || static_cast<std::size_t>(prof.es_choice[n]) != k) continue;
    delay += s.ues[n].active_prob * unit_compute_time_s(s.servers[k], prof.steps[n]);
  }
  return delay;
}

DelayBreakdown total_service_time(const Scenario& s, const UnitTimes& t,
                                  const StrategyProfile& prof, const ActivityState* omega) {
  DelayBreakdown out;
  const std::size_t n_ues = s.ues.size();
  out.access_s.assign(n_ues, 0.0);
  out.compute_s.assign(n_ues, 0.0);
  out.total_s.assign(n_ues, 0.0);
  if (omega != nullptr) {
    out.ap_load_s = realized_ap_loads(s, t, prof, *omega);
    out.es_load_s = realized_es_loads(s, prof, *omega);
    for (std::size_t n = 0; n < n_ues; ++n) {
      if (!omega->active[n]) continue;  // inactive UEs carry zero delay
      out.access_s[n] = out.ap_load_s[static_cast<std::size_t>(prof.ap_choice[n])];
      out.compute_s[n] = out.es_load_s[static_cast<std::size_t>(prof.es_choice[n])];
      out.total_s[n] = out.access_s[n] + out.compute_s[n];
    }
  } else {
    out.ap_load_s = expected_ap_loads(s, t, prof);
    out.es_load_s = expected_es_loads(s, prof);
    for (std::size_t n = 0; n < n_ues; ++n) {
      out.access_s[n] = out.ap_load_s[static_cast<std::size_t>(prof.ap_choice[n])];
      out.compute_s[n] = out.es_load_s[static_cast<std::size_t>(prof.es_choice[n])];
      out.total_s[n] = out.access_s[n] + out.compute_s[n];
    }
  }
  return out;
}

double system_expected_total_s(const Scenario& s, const UnitTimes& t,
                               const StrategyProfile& prof) {
  DelayBreakdown b = total_service_time(s, t, prof, nullptr);
  double sum = 0.0;
  for (double v : b.total_s) sum += v;
  return sum;
}

double system_realized_total_s(const Scenario& s, const UnitTimes& t,
                               const StrategyProfile& prof, const ActivityState& omega) {
  DelayBreakdown b = total_service_time(s, t, prof, &omega);
  double sum = 0.0;
  for (double v : b.total_s) sum += v;
  return sum;
}

}  // namespace jcaco
