#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "windtwin/ingest/frame.hpp"
#include "windtwin/rng.hpp"
#include "windtwin/synth/scenario.hpp"

namespace windtwin::synth {

struct GroundTruthEvent {
  std::string kind;
  std::string channel;  // empty for turbine-level events
  Timestamp start = 0;
  Timestamp end = 0;
  std::optional<Timestamp> linked_fault_start;
  std::optional<std::int64_t> lead_seconds;
};

struct GroundTruth {
  std::vector<GroundTruthEvent> events;

  std::optional<GroundTruthEvent> first(const std::string& kind) const {
    for (const auto& e : events) {
      if (e.kind == kind) return e;
    }
    return std::nullopt;
  }

  nlohmann::json to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : events) {
      nlohmann::json ej{{"kind", e.kind},
                        {"start", format_iso8601(e.start)},
                        {"end", format_iso8601(e.end)}};
      if (!e.channel.empty()) ej["channel"] = e.channel;
      if (e.linked_fault_start) ej["linked_fault_start"] = format_iso8601(*e.linked_fault_start);
      if (e.lead_seconds) ej["lead_seconds"] = *e.lead_seconds;
      out.push_back(std::move(ej));
    }
    return nlohmann::json{{"format", "windtwin-ground-truth"}, {"version", 1}, {"events", out}};
  }

  static GroundTruth from_json(const nlohmann::json& j) {
    GroundTruth truth;
    for (const auto& ej : j.at("events")) {
      GroundTruthEvent e;
      e.kind = ej.at("kind").get<std::string>();
      e.channel = ej.value("channel", "");
      e.start = *parse_iso8601(ej.at("start").get<std::string>());
      e.end = *parse_iso8601(ej.at("end").get<std::string>());
      if (ej.contains("linked_fault_start"))
        e.linked_fault_start = *parse_iso8601(ej.at("linked_fault_start").get<std::string>());
      if (ej.contains("lead_seconds")) e.lead_seconds = ej.at("lead_seconds").get<std::int64_t>();
      truth.events.push_back(std::move(e));
    }
    return truth;
  }
};

struct GeneratedData {
  ingest::Series frames;
  GroundTruth truth;
};

namespace generate_detail {

struct Interval {
  Timestamp start, end;  // [start, end)
  int code;
  bool contains(Timestamp t) const { return t >= start && t < end; }
};

}  // namespace generate_detail

// Minute-resolution synthetic SCADA series. Rotor speed follows a clipped
// mean-reverting process, every endogenous temperature relaxes toward
// rpm_gain * rpm + ambient_coupling * ambient with its own time constant, and
// downtimes zero the rotor so components cool and later reheat through the
// same dynamics. Fixed seeds give byte-identical output.
inline GeneratedData generate(const ScenarioSpec& spec) {
  if (spec.duration_days <= 0) throw ScenarioError("scenario duration must be positive");
  if (spec.thermal.empty()) throw ScenarioError("scenario needs at least one thermal channel");
  for (const auto& t : spec.thermal) {
    if (!(t.time_constant_minutes > 0.0))
      throw ScenarioError("time constant must be positive for channel " + t.id);
  }
  const Timestamp end_time = spec.start_time + spec.duration_minutes() * kSecondsPerMinute;

  // Downtime intervals: planned stops plus injected faults. Overlaps are a
  // scenario error.
  std::vector<generate_detail::Interval> downs;
  for (const auto& d : spec.planned_downtimes) {
    downs.push_back({d.start, d.start + d.duration_minutes * kSecondsPerMinute, d.code});
  }
  GroundTruth truth;
  for (const auto& e : spec.events) {
    if (e.start < spec.start_time || e.start >= end_time)
      throw ScenarioError("injected event lies outside the scenario duration");
    if (e.kind == EventKind::fault) {
      downs.push_back({e.start, e.start + e.duration_minutes * kSecondsPerMinute, 2});
    }
  }
  std::sort(downs.begin(), downs.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < downs.size(); ++i) {
    if (downs[i].start < downs[i - 1].end) {
      throw ScenarioError("overlapping downtimes at " + format_iso8601(downs[i].start));
    }
  }

  // Drift events must line up with their linked fault when a lead is declared.
  for (const auto& e : spec.events) {
    if (e.kind != EventKind::thermal_drift || !e.linked_fault_lead_minutes) continue;
    const Timestamp expected = e.start + *e.linked_fault_lead_minutes * kSecondsPerMinute;
    bool found = false;
    for (const auto& f : spec.events) {
      if (f.kind == EventKind::fault && f.start == expected) found = true;
    }
    if (!found)
      throw ScenarioError("drift on " + e.channel + " declares a linked fault at " +
                          format_iso8601(expected) + " but no such fault is injected");
  }

  const auto schema = spec.schema();
  const std::size_t n_thermal = spec.thermal.size();
  const std::size_t ambient_col = n_thermal;
  const std::size_t rpm_col = n_thermal + 1;

  Rng rng(spec.seed);

  // Exact discrete mean-reverting updates; stationary initial draws.
  const double rotor_alpha = std::exp(-1.0 / spec.rotor.correlation_minutes);
  const double rotor_kick = spec.rotor.std_dev_rpm * std::sqrt(1.0 - rotor_alpha * rotor_alpha);
  double rotor_state = spec.rotor.mean_rpm + spec.rotor.std_dev_rpm * rng.gaussian();

  const double amb_alpha = std::exp(-1.0 / spec.ambient.correlation_minutes);
  const double amb_kick = spec.ambient.std_dev_c * std::sqrt(1.0 - amb_alpha * amb_alpha);
  double amb_state = spec.ambient.std_dev_c * rng.gaussian();

  auto ambient_at = [&](Timestamp t, double disturbance) {
    const double minute_of_day = static_cast<double>((t / kSecondsPerMinute) % 1440);
    return spec.ambient.mean_c +
           spec.ambient.daily_amplitude_c *
               std::sin(2.0 * 3.14159265358979323846 * minute_of_day / 1440.0) +
           disturbance;
  };

  auto clip_rpm = [&](double x) {
    return std::clamp(x, spec.rotor.cut_in_rpm, spec.rotor.cut_out_rpm);
  };

  // Thermal states start in equilibrium with the initial operating point.
  const double rpm0 = clip_rpm(rotor_state);
  const double amb0 = ambient_at(spec.start_time, amb_state);
  std::vector<double> temp(n_thermal);
  std::vector<double> relax(n_thermal);
  std::vector<double> disturbance(n_thermal);
  std::vector<double> dist_alpha(n_thermal), dist_kick(n_thermal);
  for (std::size_t k = 0; k < n_thermal; ++k) {
    const auto& ch = spec.thermal[k];
    temp[k] = ch.rpm_gain * rpm0 + ch.ambient_coupling * amb0;
    relax[k] = 1.0 - std::exp(-1.0 / ch.time_constant_minutes);
    dist_alpha[k] = std::exp(-1.0 / ch.disturbance_correlation_minutes);
    dist_kick[k] = ch.disturbance_sigma_c * std::sqrt(1.0 - dist_alpha[k] * dist_alpha[k]);
    disturbance[k] = ch.disturbance_sigma_c * rng.gaussian();
  }

  auto drift_target_offset = [&](std::size_t k, Timestamp t) {
    double offset = 0.0;
    for (const auto& e : spec.events) {
      if (e.kind != EventKind::thermal_drift || e.channel != spec.thermal[k].id) continue;
      const Timestamp stop = e.start + e.duration_minutes * kSecondsPerMinute;
      if (t >= e.start && t < stop) {
        offset += e.ramp_c_per_hour * static_cast<double>(t - e.start) / 3600.0;
      }
    }
    return offset;
  };

  auto dropout_active = [&](std::size_t col, Timestamp t) {
    for (const auto& e : spec.events) {
      if (e.kind != EventKind::sensor_dropout) continue;
      if (schema.index_of(e.channel) != col) continue;
      if (t >= e.start && t < e.start + e.duration_minutes * kSecondsPerMinute) return true;
    }
    return false;
  };

  GeneratedData out;
  out.frames.reserve(static_cast<std::size_t>(spec.duration_minutes()));
  std::size_t down_idx = 0;

  for (std::int64_t m = 0; m < spec.duration_minutes(); ++m) {
    const Timestamp t = spec.start_time + m * kSecondsPerMinute;
    while (down_idx < downs.size() && t >= downs[down_idx].end) ++down_idx;
    const bool down = down_idx < downs.size() && downs[down_idx].contains(t);
    const int code = down ? downs[down_idx].code : 0;

    rotor_state = spec.rotor.mean_rpm + rotor_alpha * (rotor_state - spec.rotor.mean_rpm) +
                  rotor_kick * rng.gaussian();
    amb_state = amb_alpha * amb_state + amb_kick * rng.gaussian();

    const double rpm = down ? 0.0 : clip_rpm(rotor_state);
    const double ambient = ambient_at(t, amb_state);

    ingest::ScadaFrame frame;
    frame.timestamp = t;
    frame.status_code = code;
    frame.operational_code = code;
    frame.values.resize(schema.size());

    for (std::size_t k = 0; k < n_thermal; ++k) {
      const auto& ch = spec.thermal[k];
      const double target =
          ch.rpm_gain * rpm + ch.ambient_coupling * ambient + drift_target_offset(k, t);
      temp[k] += relax[k] * (target - temp[k]);
      disturbance[k] = dist_alpha[k] * disturbance[k] + dist_kick[k] * rng.gaussian();
      const double measured = temp[k] + disturbance[k] + ch.noise_sigma_c * rng.gaussian();
      if (!dropout_active(k, t)) frame.values[k] = measured;
    }
    if (!dropout_active(ambient_col, t)) frame.values[ambient_col] = ambient;
    if (!dropout_active(rpm_col, t)) frame.values[rpm_col] = rpm;

    out.frames.push_back(std::move(frame));
  }

  // Ground truth carries every injected event with its exact start.
  for (const auto& d : spec.planned_downtimes) {
    truth.events.push_back({"downtime", "", d.start,
                            d.start + d.duration_minutes * kSecondsPerMinute, std::nullopt,
                            std::nullopt});
  }
  for (const auto& e : spec.events) {
    GroundTruthEvent g;
    g.kind = std::string(to_string(e.kind));
    g.channel = e.channel;
    g.start = e.start;
    g.end = e.start + e.duration_minutes * kSecondsPerMinute;
    if (e.kind == EventKind::thermal_drift && e.linked_fault_lead_minutes) {
      g.linked_fault_start = e.start + *e.linked_fault_lead_minutes * kSecondsPerMinute;
      g.lead_seconds = *e.linked_fault_lead_minutes * kSecondsPerMinute;
    }
    truth.events.push_back(std::move(g));
  }
  std::sort(truth.events.begin(), truth.events.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });
  out.truth = std::move(truth);
  return out;
}

}  // namespace windtwin::synth
