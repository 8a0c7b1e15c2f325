#pragma once

#include <string_view>
#include <vector>

#include "windtwin/errors.hpp"
#include "windtwin/ingest/frame.hpp"
#include "windtwin/ingest/schema.hpp"

namespace windtwin::ingest {

// Per-timestep operating label. Every timestep carries exactly one label.
// fault and reheating come from the turbine codes; causal_window is empty by
// default (the training data is assumed anomaly-free); extended_reheating and
// excluded_missing are assigned downstream.
enum class MaskLabel {
  normal,
  fault,
  reheating,
  causal_window,
  extended_reheating,
  excluded_missing,
};

inline std::string_view to_string(MaskLabel label) {
  switch (label) {
    case MaskLabel::normal: return "normal";
    case MaskLabel::fault: return "fault";
    case MaskLabel::reheating: return "reheating";
    case MaskLabel::causal_window: return "causal-window";
    case MaskLabel::extended_reheating: return "extended-reheating";
    case MaskLabel::excluded_missing: return "excluded-missing";
  }
  return "?";
}

struct OperatingMask {
  std::vector<MaskLabel> labels;  // aligned with the series

  bool excluded_from_training(std::size_t i) const {
    const auto l = labels[i];
    return l != MaskLabel::normal;
  }
};

// Labels downtime timesteps as fault and the reheat window after each
// fault-to-operating transition as reheating. The reheat window is wall-clock:
// a frame is reheating while its timestamp is less than restart time plus
// reheat_minutes.
inline OperatingMask build_mask(const Series& series, const StatusCodeMap& codes,
                                DowntimeField field = DowntimeField::status_code,
                                int reheat_minutes = 60) {
  OperatingMask mask;
  mask.labels.reserve(series.size());
  bool prev_down = false;
  Timestamp reheat_until = 0;  // exclusive
  bool reheating_active = false;
  for (const auto& frame : series) {
    const bool down = codes.is_down(frame.code(field));
    if (down) {
      mask.labels.push_back(MaskLabel::fault);
      reheating_active = false;
    } else {
      if (prev_down) {
        reheat_until = frame.timestamp + static_cast<Timestamp>(reheat_minutes) * kSecondsPerMinute;
        reheating_active = true;
      }
      if (reheating_active && frame.timestamp < reheat_until) {
        mask.labels.push_back(MaskLabel::reheating);
      } else {
        reheating_active = false;
        mask.labels.push_back(MaskLabel::normal);
      }
    }
    prev_down = down;
  }
  return mask;
}

}  // namespace windtwin::ingest
