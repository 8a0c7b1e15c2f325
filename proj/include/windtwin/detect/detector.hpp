#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "windtwin/detect/coincidence.hpp"
#include "windtwin/detect/events.hpp"
#include "windtwin/detect/thresholds.hpp"
#include "windtwin/ingest/mask.hpp"
#include "windtwin/nom/model.hpp"

namespace windtwin::detect {

struct DetectorConfig {
  ingest::StatusCodeMap status_map;
  ingest::DowntimeField downtime_field = ingest::DowntimeField::status_code;
  int reheat_minutes = 60;
  int missing_threshold = 10;  // consecutive missing values per sensor anomaly
};

enum class TurbinePhase { normal, downtime, reheating, extended_reheating };

inline std::string_view to_string(TurbinePhase p) {
  switch (p) {
    case TurbinePhase::normal: return "normal";
    case TurbinePhase::downtime: return "downtime";
    case TurbinePhase::reheating: return "reheating";
    case TurbinePhase::extended_reheating: return "extended-reheating";
  }
  return "?";
}

struct StepResult {
  std::vector<AnomalyEvent> events;
  TurbinePhase phase = TurbinePhase::normal;
  // Squared normalized residual per model, nullopt where not evaluable.
  std::vector<std::optional<double>> residuals;
};

// Streaming anomaly detector, one instance per turbine. Consumes minute frames
// in timestamp order and walks four phases:
//
//   downtime            turbine down per status code; measurement anomalies off
//   reheating           first reheat_minutes after restart; suppressed
//   extended_reheating  after reheating, residual exceedances are classified as
//                       suppressed extended reheating until every channel falls
//                       below its release threshold d_er simultaneously
//   normal              residual^2 > d opens a measurement-anomaly episode
//
// Missing values are counted per channel at all times; the counter resets on
// any received value and fires a single sensor anomaly per outage when it
// reaches the configured threshold. Consecutive exceedances merge into one
// episode; an episode closes once the residual drops below d_er (release
// hysteresis) or the phase leaves normal operation.
class Detector {
 public:
  // Optional hook that diagnoses a measurement anomaly at its trigger frame.
  using Diagnoser = std::function<std::optional<diagnose::DiagnosisReport>(
      const AnomalyEvent&, const ingest::ScadaFrame&)>;

  Detector(const ingest::Schema& schema, std::vector<nom::NomModel> models, ThresholdSet thresholds,
           DetectorConfig config, Diagnoser diagnoser = nullptr)
      : schema_(schema),
        models_(std::move(models)),
        thresholds_(std::move(thresholds)),
        config_(config),
        diagnoser_(std::move(diagnoser)),
        channels_(schema.size()),
        episodes_(models_.size()) {
    for (const auto& model : models_) {
      max_window_ = std::max(max_window_, model.kind == nom::ModelKind::lstm
                                              ? model.sequence_length()
                                              : std::size_t{0});
    }
  }

  const std::vector<nom::NomModel>& models() const { return models_; }
  const ThresholdSet& thresholds() const { return thresholds_; }
  TurbinePhase phase() const { return phase_; }

  StepResult step(const ingest::ScadaFrame& frame) {
    if (last_timestamp_ && frame.timestamp <= *last_timestamp_) {
      throw StreamError("out-of-order frame: " + format_iso8601(frame.timestamp) +
                        " does not advance past " + format_iso8601(*last_timestamp_));
    }
    StepResult result;

    const bool down = config_.status_map.is_down(frame.code(config_.downtime_field));
    if (down) {
      phase_ = TurbinePhase::downtime;
    } else if (phase_ == TurbinePhase::downtime) {
      phase_ = TurbinePhase::reheating;
      reheat_until_ = frame.timestamp +
                      static_cast<Timestamp>(config_.reheat_minutes) * kSecondsPerMinute;
    }
    if (phase_ == TurbinePhase::reheating && frame.timestamp >= reheat_until_) {
      phase_ = TurbinePhase::extended_reheating;
    }

    track_missing(frame, result);

    result.residuals = compute_residuals(frame);

    switch (phase_) {
      case TurbinePhase::downtime:
      case TurbinePhase::reheating:
        close_all_episodes();
        break;
      case TurbinePhase::extended_reheating:
        if (all_below_release(result.residuals)) {
          phase_ = TurbinePhase::normal;
          close_all_episodes();
        } else {
          run_episode_logic(frame, result, AnomalyKind::suppressed_extended_reheating);
        }
        break;
      case TurbinePhase::normal:
        run_episode_logic(frame, result, AnomalyKind::measurement);
        break;
    }
    result.phase = phase_;

    if (max_window_ > 0) {
      buffer_.push_back(frame);
      while (buffer_.size() > max_window_) buffer_.pop_front();
    }
    last_timestamp_ = frame.timestamp;
    return result;
  }

  // State round-trip for crash-safe resume in follow mode. Models, thresholds
  // and schema are reconstructed from their own artifacts; this captures only
  // the mutable stream state.
  nlohmann::json state_to_json() const {
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& ch : channels_) {
      channels.push_back({{"missing_streak", ch.missing_streak},
                          {"outage_reported", ch.outage_reported}});
    }
    nlohmann::json episodes = nlohmann::json::array();
    for (const auto& open : episodes_) episodes.push_back(open);
    nlohmann::json buffer = nlohmann::json::array();
    for (const auto& frame : buffer_) {
      nlohmann::json values = nlohmann::json::array();
      for (const auto& v : frame.values) {
        if (v) values.push_back(*v);
        else values.push_back(nullptr);
      }
      buffer.push_back({{"timestamp", frame.timestamp},
                        {"status_code", frame.status_code},
                        {"operational_code", frame.operational_code},
                        {"values", values}});
    }
    nlohmann::json j{{"phase", std::string(to_string(phase_))},
                     {"reheat_until", reheat_until_},
                     {"channels", channels},
                     {"episodes", episodes},
                     {"buffer", buffer}};
    if (last_timestamp_) j["last_timestamp"] = *last_timestamp_;
    return j;
  }

  void restore_state(const nlohmann::json& j) {
    const auto phase = j.at("phase").get<std::string>();
    if (phase == "normal") phase_ = TurbinePhase::normal;
    else if (phase == "downtime") phase_ = TurbinePhase::downtime;
    else if (phase == "reheating") phase_ = TurbinePhase::reheating;
    else if (phase == "extended-reheating") phase_ = TurbinePhase::extended_reheating;
    else throw StreamError("corrupt detector state: unknown phase " + phase);
    reheat_until_ = j.at("reheat_until").get<Timestamp>();
    if (j.contains("last_timestamp")) last_timestamp_ = j.at("last_timestamp").get<Timestamp>();
    const auto& channels = j.at("channels");
    if (channels.size() != channels_.size())
      throw StreamError("corrupt detector state: channel count mismatch");
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      channels_[i].missing_streak = channels[i].at("missing_streak").get<int>();
      channels_[i].outage_reported = channels[i].at("outage_reported").get<bool>();
    }
    const auto& episodes = j.at("episodes");
    if (episodes.size() != episodes_.size())
      throw StreamError("corrupt detector state: model count mismatch");
    for (std::size_t i = 0; i < episodes_.size(); ++i) episodes_[i] = episodes[i].get<bool>();
    buffer_.clear();
    for (const auto& fj : j.at("buffer")) {
      ingest::ScadaFrame frame;
      frame.timestamp = fj.at("timestamp").get<Timestamp>();
      frame.status_code = fj.at("status_code").get<int>();
      frame.operational_code = fj.at("operational_code").get<int>();
      for (const auto& v : fj.at("values")) {
        if (v.is_null()) frame.values.emplace_back(std::nullopt);
        else frame.values.emplace_back(v.get<double>());
      }
      buffer_.push_back(std::move(frame));
    }
  }

 private:
  struct ChannelWatch {
    int missing_streak = 0;
    bool outage_reported = false;
  };

  void track_missing(const ingest::ScadaFrame& frame, StepResult& result) {
    for (std::size_t j = 0; j < channels_.size() && j < frame.values.size(); ++j) {
      auto& watch = channels_[j];
      if (frame.values[j]) {
        watch.missing_streak = 0;
        watch.outage_reported = false;
        continue;
      }
      ++watch.missing_streak;
      if (watch.missing_streak >= config_.missing_threshold && !watch.outage_reported) {
        watch.outage_reported = true;
        AnomalyEvent event;
        event.timestamp = frame.timestamp;
        event.channel = schema_.at(j).id;
        event.kind = AnomalyKind::sensor;
        event.residual_sq = 0.0;
        event.threshold = static_cast<double>(config_.missing_threshold);
        result.events.push_back(std::move(event));
      }
    }
  }

  std::vector<std::optional<double>> compute_residuals(const ingest::ScadaFrame& frame) const {
    std::vector<std::optional<double>> residuals(models_.size());
    for (std::size_t m = 0; m < models_.size(); ++m) {
      const auto& model = models_[m];
      if (!frame.values[model.target_index]) continue;
      std::optional<double> prediction;
      if (model.kind == nom::ModelKind::dense) {
        prediction = model.predict_normalized(frame);
      } else {
        const std::size_t len = model.sequence_length();
        if (buffer_.size() < len) continue;
        if (buffer_.back().timestamp + kSecondsPerMinute != frame.timestamp) continue;
        std::vector<ingest::ScadaFrame> window(buffer_.end() - static_cast<std::ptrdiff_t>(len),
                                               buffer_.end());
        prediction = model.predict_normalized_next(window);
      }
      if (!prediction) continue;
      const double measured =
          model.normalization.normalize(model.target_index, *frame.values[model.target_index]);
      const double r = *prediction - measured;
      residuals[m] = r * r;
    }
    return residuals;
  }

  bool all_below_release(const std::vector<std::optional<double>>& residuals) const {
    for (std::size_t m = 0; m < models_.size(); ++m) {
      if (!residuals[m]) return false;  // cannot confirm release without a reading
      if (*residuals[m] >= thresholds_.d_er_for(models_[m].target_channel)) return false;
    }
    return !models_.empty();
  }

  void run_episode_logic(const ingest::ScadaFrame& frame, StepResult& result, AnomalyKind kind) {
    for (std::size_t m = 0; m < models_.size(); ++m) {
      if (!result.residuals[m]) continue;  // not evaluable: episode state pauses
      const auto& channel = models_[m].target_channel;
      const double r = *result.residuals[m];
      if (!episodes_[m] && r > thresholds_.d_for(channel)) {
        episodes_[m] = true;
        AnomalyEvent event;
        event.timestamp = frame.timestamp;
        event.channel = channel;
        event.kind = kind;
        event.residual_sq = r;
        event.threshold = thresholds_.d_for(channel);
        if (kind == AnomalyKind::measurement && diagnoser_) {
          event.diagnosis = diagnoser_(event, frame);
        }
        result.events.push_back(std::move(event));
      } else if (episodes_[m] && r < thresholds_.d_er_for(channel)) {
        episodes_[m] = false;
      }
    }
  }

  void close_all_episodes() {
    for (auto&& open : episodes_) open = false;
  }

  ingest::Schema schema_;
  std::vector<nom::NomModel> models_;
  ThresholdSet thresholds_;
  DetectorConfig config_;
  Diagnoser diagnoser_;

  TurbinePhase phase_ = TurbinePhase::normal;
  Timestamp reheat_until_ = 0;
  std::optional<Timestamp> last_timestamp_;
  std::vector<ChannelWatch> channels_;
  std::vector<bool> episodes_;  // open episode per model
  std::deque<ingest::ScadaFrame> buffer_;
  std::size_t max_window_ = 0;
};

// Retrospective annotation of a measurement episode against the fault log.
struct EpisodeAnnotation {
  std::size_t event_index = 0;
  std::optional<std::int64_t> lead_seconds;
  std::optional<std::int64_t> fault_duration_seconds;
  std::optional<double> coincidence_probability;
};

struct ReplayResult {
  std::vector<AnomalyEvent> events;
  std::vector<TurbinePhase> phases;                          // per frame
  std::vector<std::vector<std::optional<double>>> residuals;  // per frame x model
  FaultLog faults;
  std::map<std::string, Timestamp> first_trigger;  // first measurement episode per channel
  std::vector<EpisodeAnnotation> annotations;
};

// Batch evaluation: folds step() over the series, then annotates each
// measurement episode with its lead time to the next fault and the coincidence
// probability of that lead. Eligible timesteps for the probability are the
// ones labeled normal where the event's model was evaluable.
inline ReplayResult replay(const ingest::Series& series, const ingest::OperatingMask& mask,
                           const ingest::Schema& schema, std::vector<nom::NomModel> models,
                           const ThresholdSet& thresholds, const DetectorConfig& config,
                           Detector::Diagnoser diagnoser = nullptr) {
  if (mask.labels.size() != series.size())
    throw ConfigError("mask and series have different lengths");
  ReplayResult result;
  Detector detector(schema, std::move(models), thresholds, config, std::move(diagnoser));

  for (const auto& frame : series) {
    auto step = detector.step(frame);
    result.phases.push_back(step.phase);
    result.residuals.push_back(std::move(step.residuals));
    for (auto& event : step.events) {
      if (event.kind == AnomalyKind::measurement && !result.first_trigger.count(event.channel)) {
        result.first_trigger[event.channel] = event.timestamp;
      }
      result.events.push_back(std::move(event));
    }
  }

  result.faults = faults_from_series(series, config.status_map, config.downtime_field);

  // Eligible timesteps per model channel, computed once on demand.
  std::map<std::string, std::vector<Timestamp>> eligible;
  const auto& detector_models = detector.models();
  auto eligible_for = [&](const std::string& channel) -> const std::vector<Timestamp>& {
    auto it = eligible.find(channel);
    if (it != eligible.end()) return it->second;
    std::size_t model_index = detector_models.size();
    for (std::size_t m = 0; m < detector_models.size(); ++m) {
      if (detector_models[m].target_channel == channel) model_index = m;
    }
    auto& times = eligible[channel];
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (mask.labels[i] != ingest::MaskLabel::normal) continue;
      if (model_index < detector_models.size() && !result.residuals[i][model_index]) continue;
      times.push_back(series[i].timestamp);
    }
    return times;
  };

  for (std::size_t e = 0; e < result.events.size(); ++e) {
    auto& event = result.events[e];
    if (event.kind != AnomalyKind::measurement) continue;
    EpisodeAnnotation annotation;
    annotation.event_index = e;
    if (const auto fault = result.faults.next_fault(event.timestamp, 0)) {
      annotation.lead_seconds = fault->start - event.timestamp;
      annotation.fault_duration_seconds = fault->duration();
      const auto& times = eligible_for(event.channel);
      if (!times.empty()) {
        annotation.coincidence_probability = coincidence_probability(
            *annotation.lead_seconds, fault->duration(), times, result.faults);
        event.coincidence_probability = annotation.coincidence_probability;
      }
    }
    result.annotations.push_back(annotation);
  }
  return result;
}

}  // namespace windtwin::detect
