#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "windtwin/errors.hpp"
#include "windtwin/ingest/schema.hpp"
#include "windtwin/time.hpp"

namespace windtwin::synth {

// Mean-reverting rotor-speed process, clipped at cut-in/cut-out.
struct RotorProcess {
  double mean_rpm = 14.0;
  double std_dev_rpm = 2.2;
  double correlation_minutes = 90.0;
  double cut_in_rpm = 9.0;
  double cut_out_rpm = 19.0;
};

// Ambient temperature: daily cycle plus a mean-reverting disturbance.
struct AmbientProcess {
  double mean_c = 12.0;
  double daily_amplitude_c = 4.0;
  double std_dev_c = 1.0;
  double correlation_minutes = 360.0;
};

// First-order thermal channel: the temperature relaxes toward
// rpm_gain * rpm + ambient_coupling * ambient with the given time constant.
// Each channel also carries an independent slow mean-reverting disturbance
// (local heat fluctuations a NOM cannot infer from the other channels) on top
// of white measurement noise.
struct ThermalChannel {
  std::string id;
  std::string component_tag;
  double rpm_gain = 2.0;          // degC per rpm
  double ambient_coupling = 1.0;  // degC per degC ambient
  double time_constant_minutes = 15.0;
  double noise_sigma_c = 0.15;    // measurement noise
  double disturbance_sigma_c = 0.6;
  double disturbance_correlation_minutes = 240.0;
};

struct Downtime {
  Timestamp start = 0;
  std::int64_t duration_minutes = 0;
  int code = 1;  // status code while down; 0 is reserved for operating
};

enum class EventKind { thermal_drift, sensor_dropout, fault };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::thermal_drift: return "thermal-drift";
    case EventKind::sensor_dropout: return "sensor-dropout";
    case EventKind::fault: return "fault";
  }
  return "?";
}

inline EventKind event_kind_from_string(std::string_view s) {
  if (s == "thermal-drift") return EventKind::thermal_drift;
  if (s == "sensor-dropout") return EventKind::sensor_dropout;
  if (s == "fault") return EventKind::fault;
  throw ScenarioError("unknown injected event kind: " + std::string(s));
}

struct InjectedEvent {
  EventKind kind = EventKind::fault;
  std::string channel;  // drift / dropout target
  Timestamp start = 0;
  std::int64_t duration_minutes = 0;
  double ramp_c_per_hour = 0.0;  // thermal drift rate
  // For a drift that precedes a fault: the injected fault must start exactly
  // this many minutes after the drift starts.
  std::optional<std::int64_t> linked_fault_lead_minutes;
};

struct ScenarioSpec {
  std::string name = "custom";
  std::uint64_t seed = 1;
  Timestamp start_time = make_timestamp(2026, 1, 1);
  int duration_days = 30;
  RotorProcess rotor;
  AmbientProcess ambient;
  std::vector<ThermalChannel> thermal;
  std::vector<Downtime> planned_downtimes;
  std::vector<InjectedEvent> events;

  std::int64_t duration_minutes() const {
    return static_cast<std::int64_t>(duration_days) * 24 * 60;
  }

  ingest::Schema schema() const {
    std::vector<ingest::ChannelSpec> channels;
    for (const auto& t : thermal) {
      channels.push_back({t.id, ingest::ChannelRole::endogenous, "°C", t.component_tag});
    }
    channels.push_back(
        {"ambient_temp", ingest::ChannelRole::exogenous, "°C", "environment-ambient"});
    channels.push_back({"rotor_rpm", ingest::ChannelRole::exogenous, "RPM", "rotor-shaft"});
    return ingest::Schema(channels);
  }
};

// The six gearbox temperature channels used throughout: oil, shaft bearing,
// generator rotor, generator stator, and the two shaft brakes.
inline std::vector<ThermalChannel> default_thermal_channels() {
  return {
      {"gearbox_oil_temp", "gearbox-oil", 2.2, 1.0, 25.0, 0.15, 0.5, 240.0},
      {"shaft_bearing_temp", "shaft-bearing", 1.6, 1.0, 18.0, 0.15, 0.5, 240.0},
      {"generator_rotor_temp", "generator-rotor", 2.8, 1.0, 14.0, 0.15, 0.28, 240.0},
      {"generator_stator_temp", "generator-stator", 2.6, 1.0, 16.0, 0.15, 0.5, 240.0},
      {"shaft_brake1_temp", "shaft-brake1", 1.3, 1.0, 10.0, 0.15, 0.5, 240.0},
      {"shaft_brake2_temp", "shaft-brake2", 1.35, 1.0, 11.0, 0.15, 0.5, 240.0},
  };
}

namespace scenario_json {

using nlohmann::json;

inline json to_json(const ScenarioSpec& spec) {
  json thermal = json::array();
  for (const auto& t : spec.thermal) {
    thermal.push_back({{"id", t.id},
                       {"component_tag", t.component_tag},
                       {"rpm_gain", t.rpm_gain},
                       {"ambient_coupling", t.ambient_coupling},
                       {"time_constant_minutes", t.time_constant_minutes},
                       {"noise_sigma_c", t.noise_sigma_c},
                       {"disturbance_sigma_c", t.disturbance_sigma_c},
                       {"disturbance_correlation_minutes", t.disturbance_correlation_minutes}});
  }
  json downtimes = json::array();
  for (const auto& d : spec.planned_downtimes) {
    downtimes.push_back({{"start", format_iso8601(d.start)},
                         {"duration_minutes", d.duration_minutes},
                         {"code", d.code}});
  }
  json events = json::array();
  for (const auto& e : spec.events) {
    json ej{{"kind", std::string(to_string(e.kind))},
            {"start", format_iso8601(e.start)},
            {"duration_minutes", e.duration_minutes}};
    if (!e.channel.empty()) ej["channel"] = e.channel;
    if (e.ramp_c_per_hour != 0.0) ej["ramp_c_per_hour"] = e.ramp_c_per_hour;
    if (e.linked_fault_lead_minutes) ej["linked_fault_lead_minutes"] = *e.linked_fault_lead_minutes;
    events.push_back(std::move(ej));
  }
  return json{{"name", spec.name},
              {"seed", spec.seed},
              {"start_time", format_iso8601(spec.start_time)},
              {"duration_days", spec.duration_days},
              {"rotor",
               {{"mean_rpm", spec.rotor.mean_rpm},
                {"std_dev_rpm", spec.rotor.std_dev_rpm},
                {"correlation_minutes", spec.rotor.correlation_minutes},
                {"cut_in_rpm", spec.rotor.cut_in_rpm},
                {"cut_out_rpm", spec.rotor.cut_out_rpm}}},
              {"ambient",
               {{"mean_c", spec.ambient.mean_c},
                {"daily_amplitude_c", spec.ambient.daily_amplitude_c},
                {"std_dev_c", spec.ambient.std_dev_c},
                {"correlation_minutes", spec.ambient.correlation_minutes}}},
              {"thermal", thermal},
              {"planned_downtimes", downtimes},
              {"events", events}};
}

inline Timestamp parse_time_field(const json& j, const char* field) {
  const auto s = j.at(field).get<std::string>();
  const auto t = parse_iso8601(s);
  if (!t) throw ScenarioError(std::string("unparseable timestamp in scenario field ") + field);
  return *t;
}

inline ScenarioSpec from_json(const json& j) {
  ScenarioSpec spec;
  spec.name = j.value("name", "custom");
  spec.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("start_time")) spec.start_time = parse_time_field(j, "start_time");
  spec.duration_days = j.at("duration_days").get<int>();
  if (j.contains("rotor")) {
    const auto& r = j.at("rotor");
    spec.rotor.mean_rpm = r.value("mean_rpm", spec.rotor.mean_rpm);
    spec.rotor.std_dev_rpm = r.value("std_dev_rpm", spec.rotor.std_dev_rpm);
    spec.rotor.correlation_minutes = r.value("correlation_minutes", spec.rotor.correlation_minutes);
    spec.rotor.cut_in_rpm = r.value("cut_in_rpm", spec.rotor.cut_in_rpm);
    spec.rotor.cut_out_rpm = r.value("cut_out_rpm", spec.rotor.cut_out_rpm);
  }
  if (j.contains("ambient")) {
    const auto& a = j.at("ambient");
    spec.ambient.mean_c = a.value("mean_c", spec.ambient.mean_c);
    spec.ambient.daily_amplitude_c = a.value("daily_amplitude_c", spec.ambient.daily_amplitude_c);
    spec.ambient.std_dev_c = a.value("std_dev_c", spec.ambient.std_dev_c);
    spec.ambient.correlation_minutes =
        a.value("correlation_minutes", spec.ambient.correlation_minutes);
  }
  if (j.contains("thermal")) {
    for (const auto& tj : j.at("thermal")) {
      ThermalChannel t;
      t.id = tj.at("id").get<std::string>();
      t.component_tag = tj.value("component_tag", t.id);
      t.rpm_gain = tj.value("rpm_gain", t.rpm_gain);
      t.ambient_coupling = tj.value("ambient_coupling", t.ambient_coupling);
      t.time_constant_minutes = tj.value("time_constant_minutes", t.time_constant_minutes);
      t.noise_sigma_c = tj.value("noise_sigma_c", t.noise_sigma_c);
      t.disturbance_sigma_c = tj.value("disturbance_sigma_c", t.disturbance_sigma_c);
      t.disturbance_correlation_minutes =
          tj.value("disturbance_correlation_minutes", t.disturbance_correlation_minutes);
      spec.thermal.push_back(std::move(t));
    }
  } else {
    spec.thermal = default_thermal_channels();
  }
  if (j.contains("planned_downtimes")) {
    for (const auto& dj : j.at("planned_downtimes")) {
      Downtime d;
      d.start = parse_time_field(dj, "start");
      d.duration_minutes = dj.at("duration_minutes").get<std::int64_t>();
      d.code = dj.value("code", 1);
      spec.planned_downtimes.push_back(d);
    }
  }
  if (j.contains("events")) {
    for (const auto& ej : j.at("events")) {
      InjectedEvent e;
      e.kind = event_kind_from_string(ej.at("kind").get<std::string>());
      e.channel = ej.value("channel", "");
      e.start = parse_time_field(ej, "start");
      e.duration_minutes = ej.at("duration_minutes").get<std::int64_t>();
      e.ramp_c_per_hour = ej.value("ramp_c_per_hour", 0.0);
      if (ej.contains("linked_fault_lead_minutes"))
        e.linked_fault_lead_minutes = ej.at("linked_fault_lead_minutes").get<std::int64_t>();
      spec.events.push_back(std::move(e));
    }
  }
  return spec;
}

}  // namespace scenario_json

}  // namespace windtwin::synth
