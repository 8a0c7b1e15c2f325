#pragma once

#include <map>
#include <string>

#include "windtwin/synth/scenario.hpp"

namespace windtwin::synth {

// Named scenarios used by the CLI and the test suites.
//
//   clean-year        one year, no events; replay must stay silent
//   paper-analogue    90 days; a slow generator-rotor heat drift starting 7.8 h
//                     before a 4.2-day fault, plus benign stops
//   benign-downtimes  five planned stops of mixed length, nothing injected
//   sensor-outage     a single 45-minute sensor dropout
//   short-stops       several sub-30-minute stops for probability comparisons
//   dual-drift        rotor and stator drift toward the same fault; the faster
//                     rotor drift should trigger first
inline std::map<std::string, ScenarioSpec> scenario_library() {
  std::map<std::string, ScenarioSpec> lib;
  const Timestamp t0 = make_timestamp(2026, 1, 1);
  auto at = [&](int day, int hour, int minute = 0) {
    return t0 + static_cast<Timestamp>(day) * kSecondsPerDay +
           static_cast<Timestamp>(hour) * kSecondsPerHour +
           static_cast<Timestamp>(minute) * kSecondsPerMinute;
  };

  {
    ScenarioSpec s;
    s.name = "clean-year";
    s.seed = 101;
    s.duration_days = 365;
    s.thermal = default_thermal_channels();
    lib[s.name] = s;
  }

  {
    ScenarioSpec s;
    s.name = "paper-analogue";
    s.seed = 42;
    s.duration_days = 90;
    s.thermal = default_thermal_channels();
    s.planned_downtimes = {
        {at(10, 8), 45, 1}, {at(20, 14), 120, 1}, {at(31, 3), 30, 1},
        {at(42, 19), 180, 1}, {at(50, 11), 60, 1}, {at(86, 9), 90, 1},
    };
    // 4.2-day fault preceded 7.8 h (468 min) by a rotor heat drift strong
    // enough to stand out of the NOM residual long before the stop.
    const Timestamp fault_start = at(70, 0);
    InjectedEvent drift;
    drift.kind = EventKind::thermal_drift;
    drift.channel = "generator_rotor_temp";
    drift.start = fault_start - 468 * kSecondsPerMinute;
    drift.duration_minutes = 468;
    drift.ramp_c_per_hour = 3.5;
    drift.linked_fault_lead_minutes = 468;
    InjectedEvent fault;
    fault.kind = EventKind::fault;
    fault.start = fault_start;
    fault.duration_minutes = 6048;  // 4.2 days
    s.events = {drift, fault};
    lib[s.name] = s;
  }

  {
    ScenarioSpec s;
    s.name = "benign-downtimes";
    s.seed = 7;
    s.duration_days = 90;
    s.thermal = default_thermal_channels();
    s.planned_downtimes = {
        {at(15, 6), 30, 1},  {at(30, 13), 120, 1}, {at(45, 2), 300, 1},
        {at(62, 17), 60, 1}, {at(78, 9), 180, 1},
    };
    lib[s.name] = s;
  }

  {
    ScenarioSpec s;
    s.name = "sensor-outage";
    s.seed = 11;
    s.duration_days = 30;
    s.thermal = default_thermal_channels();
    InjectedEvent dropout;
    dropout.kind = EventKind::sensor_dropout;
    dropout.channel = "shaft_bearing_temp";
    dropout.start = at(22, 10);
    dropout.duration_minutes = 45;
    s.events = {dropout};
    lib[s.name] = s;
  }

  {
    ScenarioSpec s;
    s.name = "short-stops";
    s.seed = 13;
    s.duration_days = 60;
    s.thermal = default_thermal_channels();
    s.planned_downtimes = {
        {at(12, 10), 25, 1}, {at(25, 15), 12, 1}, {at(40, 4), 28, 1}, {at(52, 20), 15, 1},
    };
    lib[s.name] = s;
  }

  {
    ScenarioSpec s;
    s.name = "dual-drift";
    s.seed = 17;
    s.duration_days = 90;
    s.thermal = default_thermal_channels();
    const Timestamp fault_start = at(70, 0);
    InjectedEvent rotor_drift;
    rotor_drift.kind = EventKind::thermal_drift;
    rotor_drift.channel = "generator_rotor_temp";
    rotor_drift.start = fault_start - 468 * kSecondsPerMinute;
    rotor_drift.duration_minutes = 468;
    rotor_drift.ramp_c_per_hour = 3.5;
    rotor_drift.linked_fault_lead_minutes = 468;
    InjectedEvent stator_drift = rotor_drift;
    stator_drift.channel = "generator_stator_temp";
    stator_drift.ramp_c_per_hour = 2.2;
    InjectedEvent fault;
    fault.kind = EventKind::fault;
    fault.start = fault_start;
    fault.duration_minutes = 6048;
    s.events = {rotor_drift, stator_drift, fault};
    lib[s.name] = s;
  }

  return lib;
}

}  // namespace windtwin::synth
