#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "windtwin/diagnose/report.hpp"
#include "windtwin/errors.hpp"
#include "windtwin/time.hpp"

namespace windtwin::detect {

enum class AnomalyKind { measurement, sensor, suppressed_extended_reheating };

inline std::string_view to_string(AnomalyKind k) {
  switch (k) {
    case AnomalyKind::measurement: return "measurement-anomaly";
    case AnomalyKind::sensor: return "sensor-anomaly";
    case AnomalyKind::suppressed_extended_reheating: return "suppressed-extended-reheating";
  }
  return "?";
}

inline AnomalyKind anomaly_kind_from_string(std::string_view s) {
  if (s == "measurement-anomaly") return AnomalyKind::measurement;
  if (s == "sensor-anomaly") return AnomalyKind::sensor;
  if (s == "suppressed-extended-reheating") return AnomalyKind::suppressed_extended_reheating;
  throw DataError("unknown anomaly kind: " + std::string(s));
}

// One merged anomaly episode; the timestamp and residual are taken at the
// first flagged timestep. Residuals and thresholds are squared normalized
// units. The coincidence probability is filled in by batch replay only, it
// needs the future fault log.
struct AnomalyEvent {
  Timestamp timestamp = 0;
  std::string channel;
  AnomalyKind kind = AnomalyKind::measurement;
  double residual_sq = 0.0;
  double threshold = 0.0;
  std::optional<double> coincidence_probability;
  std::optional<diagnose::DiagnosisReport> diagnosis;
};

}  // namespace windtwin::detect
