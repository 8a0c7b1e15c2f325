#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "windtwin/ingest/pipeline.hpp"
#include "windtwin/nn/dense.hpp"
#include "windtwin/nn/lstm.hpp"

namespace windtwin::nom {

enum class ModelKind { dense, lstm };

inline std::string_view to_string(ModelKind k) { return k == ModelKind::dense ? "dense" : "lstm"; }

inline ModelKind model_kind_from_string(std::string_view s) {
  if (s == "dense") return ModelKind::dense;
  if (s == "lstm") return ModelKind::lstm;
  throw ModelFormatError("unknown model kind: " + std::string(s));
}

struct TrainingFingerprint {
  std::uint64_t seed = 0;
  int epochs = 0;
  double final_training_mae = 0.0;
  double holdout_mae = 0.0;
};

// A normal-operation model for one endogenous channel. The dense variant maps
// the full input vector at time t to the target at t; the LSTM variant maps a
// window of inputs ending at t to the target at t+1. Both operate in
// normalized units internally.
struct NomModel {
  ModelKind kind = ModelKind::dense;
  std::string target_channel;
  std::vector<std::string> input_channels;  // schema order
  std::size_t target_index = 0;
  nn::DenseNet dense;
  nn::LstmNet lstm;
  int window_minutes = 30;  // LSTM training window length; inputs span window_minutes - 1
  ingest::NormalizationParams normalization;
  TrainingFingerprint fingerprint;

  std::size_t input_count() const { return input_channels.size(); }
  std::size_t sequence_length() const { return static_cast<std::size_t>(window_minutes) - 1; }

  std::optional<nn::Vec> normalized_input(const ingest::ScadaFrame& frame) const {
    return ingest::normalized_input(frame, normalization);
  }

  // Dense prediction at the frame's own timestep, normalized units.
  std::optional<double> predict_normalized(const ingest::ScadaFrame& frame) const {
    if (kind != ModelKind::dense) throw Error("predict_normalized requires a dense model");
    const auto x = normalized_input(frame);
    if (!x) return std::nullopt;  // not evaluable; feeds the missing-sensor counter
    return nn::net_forward_scalar(dense, *x);
  }

  // LSTM one-step-ahead prediction from a window ending at the last frame of
  // `window`. Requires sequence_length() frames on consecutive minutes with no
  // missing values.
  std::optional<double> predict_normalized_next(std::span<const ingest::ScadaFrame> window) const {
    if (kind != ModelKind::lstm) throw Error("predict_normalized_next requires an lstm model");
    if (window.size() != sequence_length()) return std::nullopt;
    std::vector<nn::Vec> sequence;
    sequence.reserve(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
      if (i > 0 && window[i].timestamp != window[i - 1].timestamp + kSecondsPerMinute)
        return std::nullopt;
      auto x = normalized_input(window[i]);
      if (!x) return std::nullopt;
      sequence.push_back(std::move(*x));
    }
    return nn::lstm_forward_scalar(lstm, sequence);
  }

  std::optional<double> predict(const ingest::ScadaFrame& frame) const {
    const auto y = predict_normalized(frame);
    if (!y) return std::nullopt;
    return normalization.denormalize(target_index, *y);
  }

  std::optional<double> predict_next(std::span<const ingest::ScadaFrame> window) const {
    const auto y = predict_normalized_next(window);
    if (!y) return std::nullopt;
    return normalization.denormalize(target_index, *y);
  }
};

// Squared normalized residual of the model at series index i: the dense model
// predicts frame i from itself, the LSTM model predicts frame i from the
// window ending at i-1. nullopt when the model is not evaluable there.
inline std::optional<double> residual_squared(const NomModel& model, const ingest::Series& series,
                                              std::size_t i) {
  const auto& frame = series[i];
  if (!frame.values[model.target_index]) return std::nullopt;
  std::optional<double> prediction;
  if (model.kind == ModelKind::dense) {
    prediction = model.predict_normalized(frame);
  } else {
    const std::size_t len = model.sequence_length();
    if (i < len) return std::nullopt;
    prediction = model.predict_normalized_next(
        std::span<const ingest::ScadaFrame>(series.data() + (i - len), len));
    if (prediction &&
        series[i - 1].timestamp + kSecondsPerMinute != frame.timestamp) {
      return std::nullopt;  // window must be adjacent to the predicted minute
    }
  }
  if (!prediction) return std::nullopt;
  const double measured = model.normalization.normalize(model.target_index,
                                                        *frame.values[model.target_index]);
  const double r = *prediction - measured;
  return r * r;
}

}  // namespace windtwin::nom
