#pragma once

#include <map>
#include <string>
#include <vector>

#include "windtwin/errors.hpp"
#include "windtwin/ingest/pipeline.hpp"
#include "windtwin/nom/model.hpp"

namespace windtwin::detect {

// Per-channel anomaly thresholds, squared normalized units. Both thresholds
// derive from the same maximum: d = safety_factor * max, d_er = max, so
// d == safety_factor * d_er holds exactly.
struct ThresholdSet {
  double safety_factor = 1.2;
  std::map<std::string, double> d;     // measurement-anomaly trigger
  std::map<std::string, double> d_er;  // extended-reheating release / episode release

  double d_for(const std::string& channel) const {
    const auto it = d.find(channel);
    if (it == d.end()) throw CalibrationError("no threshold for channel " + channel);
    return it->second;
  }
  double d_er_for(const std::string& channel) const {
    const auto it = d_er.find(channel);
    if (it == d_er.end()) throw CalibrationError("no threshold for channel " + channel);
    return it->second;
  }
};

// Threshold = safety factor times the largest squared residual over the
// anomaly-free training timesteps (the causal window is assumed empty).
// Timesteps where a model is not evaluable are skipped.
inline ThresholdSet calibrate_thresholds(const std::vector<nom::NomModel>& models,
                                         const ingest::Partition& train,
                                         double safety_factor = 1.2) {
  if (!(safety_factor > 1.0)) throw ConfigError("safety factor must exceed 1");
  ThresholdSet set;
  set.safety_factor = safety_factor;
  for (const auto& model : models) {
    bool seen = false;
    double max_sq = 0.0;
    for (std::size_t i = 0; i < train.frames.size(); ++i) {
      if (train.mask.labels[i] != ingest::MaskLabel::normal) continue;
      const auto r = nom::residual_squared(model, train.frames, i);
      if (!r) continue;
      if (!seen || *r > max_sq) max_sq = *r;
      seen = true;
    }
    if (!seen)
      throw CalibrationError("no evaluable timestep for channel " + model.target_channel);
    if (max_sq <= 0.0)
      throw CalibrationError("all residuals are zero for channel " + model.target_channel +
                             "; a zero threshold would alarm on noise");
    set.d[model.target_channel] = safety_factor * max_sq;
    set.d_er[model.target_channel] = max_sq;
  }
  return set;
}

}  // namespace windtwin::detect
