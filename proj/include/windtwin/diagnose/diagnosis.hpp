#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "windtwin/detect/events.hpp"
#include "windtwin/diagnose/shapley.hpp"

namespace windtwin::diagnose {

struct DiagnosisThresholds {
  double dominance_fraction = 0.7;  // case-1 share of the total impact
  double shap_factor = 1.2;         // margin on the training attribution maxima
  // Per model target channel: d_s2[i][j] bounds |contribution of input j| seen
  // during normal operation.
  std::map<std::string, std::vector<double>> d_s2;

  const std::vector<double>& row_for(const std::string& target) const {
    const auto it = d_s2.find(target);
    if (it == d_s2.end())
      throw CalibrationError("no shapley thresholds calibrated for " + target);
    return it->second;
  }
};

// d_s2 row for one model: shap_factor times the per-input maximum |attribution|
// over a seeded subsample of normal-operation training timesteps.
inline std::vector<double> calibrate_shap_thresholds(const nom::NomModel& model,
                                                     const ingest::Partition& train,
                                                     std::span<const nn::Vec> background,
                                                     double shap_factor = 1.2,
                                                     std::size_t sample_count = 1000,
                                                     std::uint64_t seed = 9001) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < train.frames.size(); ++i) {
    if (train.mask.labels[i] != ingest::MaskLabel::normal) continue;
    if (!ingest::normalized_input(train.frames[i], model.normalization)) continue;
    candidates.push_back(i);
  }
  if (candidates.empty())
    throw CalibrationError("no evaluable sample to calibrate shapley thresholds for " +
                           model.target_channel);
  Rng rng(seed);
  rng.shuffle(candidates);
  if (candidates.size() > sample_count) candidates.resize(sample_count);

  std::vector<double> max_abs(model.input_count(), 0.0);
  for (const auto i : candidates) {
    const auto x = *ingest::normalized_input(train.frames[i], model.normalization);
    const auto attribution = shapley_exact(model, x, background);
    for (std::size_t j = 0; j < max_abs.size(); ++j) {
      max_abs[j] = std::max(max_abs[j], std::fabs(attribution.contributions[j]));
    }
  }
  for (auto& v : max_abs) v *= shap_factor;
  return max_abs;
}

// Classifies a measurement anomaly:
//   case 1  the target's own contribution exceeds dominance_fraction of the
//           total impact; the anomaly is attributed to the target signal
//   case 3  otherwise, if any input contributes more than its calibrated d_s2
//           bound; those inputs are reported, a matching anomaly in their own
//           NOM is expected
//   case 2  otherwise; the inputs look normal, the measured output is off, the
//           anomaly is attributed to the target signal
// Case 1 takes precedence over case 3.
inline DiagnosisReport diagnose(const detect::AnomalyEvent& event, const nom::NomModel& model,
                                const AttributionVector& attribution,
                                const DiagnosisThresholds& thresholds) {
  DiagnosisReport report;
  report.attribution = attribution;

  const double total = attribution.total_magnitude();
  const double own = std::fabs(attribution.contributions[model.target_index]);
  if (total > 0.0 && own > thresholds.dominance_fraction * total) {
    report.case_id = 1;
    report.responsible_channels = {model.target_channel};
    report.narrative = "input " + model.target_channel +
                       " dominates the model output; anomaly attributed to " +
                       model.target_channel;
    return report;
  }

  const auto& row = thresholds.row_for(model.target_channel);
  std::vector<std::string> over;
  for (std::size_t j = 0; j < attribution.contributions.size(); ++j) {
    if (std::fabs(attribution.contributions[j]) > row[j]) {
      over.push_back(model.input_channels[j]);
    }
  }
  if (!over.empty()) {
    report.case_id = 3;
    report.responsible_channels = over;
    std::string list;
    for (const auto& ch : over) {
      if (!list.empty()) list += ", ";
      list += ch;
    }
    report.narrative = "inputs contributing beyond their normal-operation range: " + list +
                       "; anomalies expected in their own models";
    return report;
  }

  report.case_id = 2;
  report.responsible_channels = {model.target_channel};
  report.narrative = "contributions within normal range; measured " + model.target_channel +
                     " deviates from the model output";
  return report;
}

}  // namespace windtwin::diagnose
