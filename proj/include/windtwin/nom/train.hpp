#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "windtwin/ingest/pipeline.hpp"
#include "windtwin/ingest/schema.hpp"
#include "windtwin/nn/adam.hpp"
#include "windtwin/nn/gradients.hpp"
#include "windtwin/nom/model.hpp"
#include "windtwin/rng.hpp"

namespace windtwin::nom {

struct TrainingConfig {
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  int epochs = 5;
  int restarts = 3;  // independent seeded trainings; the best holdout MAE wins
  nn::Loss loss = nn::Loss::mae;
  int lstm_window = 30;  // minutes per training window, target included
  double selection_holdout_fraction = 0.1;
  std::uint64_t base_seed = 1;  // restart k trains with seed base_seed + k
  std::size_t lstm_hidden = 8;
  // Normally fitted on the training partition; tests may pin it.
  std::optional<ingest::NormalizationParams> normalization;
};

namespace train_detail {

struct DenseSample {
  nn::Vec input;
  double target;
};

struct WindowSample {
  std::vector<nn::Vec> inputs;  // lstm_window - 1 consecutive minutes
  double target;                // one step ahead of the last input
};

inline void require_endogenous(const ingest::Schema& schema, const std::string& target) {
  const auto idx = schema.index_of(target);
  if (schema.at(idx).role != ingest::ChannelRole::endogenous)
    throw ConfigError("NOM target must be an endogenous channel: " + target);
}

inline ingest::NormalizationParams resolve_normalization(const ingest::Partition& train,
                                                         const ingest::Schema& schema,
                                                         const TrainingConfig& cfg) {
  if (cfg.normalization) return *cfg.normalization;
  return ingest::fit_normalization(train.frames, schema);
}

// Same-time samples: the full normalized frame is the input, the target
// channel's normalized value the output. Frames with any missing value are
// skipped, as are non-normal mask labels.
inline std::vector<DenseSample> dense_samples(const ingest::Partition& train,
                                              std::size_t target_index,
                                              const ingest::NormalizationParams& params) {
  std::vector<DenseSample> samples;
  for (std::size_t i = 0; i < train.frames.size(); ++i) {
    if (train.mask.labels[i] != ingest::MaskLabel::normal) continue;
    auto x = ingest::normalized_input(train.frames[i], params);
    if (!x) continue;
    const double y = (*x)[target_index];
    samples.push_back({std::move(*x), y});
  }
  return samples;
}

// Non-overlapping windows of cfg.lstm_window consecutive clean minutes. The
// first window-1 frames are the input sequence, the last frame supplies the
// one-step-ahead target.
inline std::vector<WindowSample> window_samples(const ingest::Partition& train,
                                                std::size_t target_index,
                                                const ingest::NormalizationParams& params,
                                                int window_minutes) {
  std::vector<WindowSample> windows;
  const std::size_t window = static_cast<std::size_t>(window_minutes);
  std::vector<nn::Vec> run;
  Timestamp run_last = 0;

  auto harvest = [&]() {
    for (std::size_t off = 0; off + window <= run.size(); off += window) {
      WindowSample sample;
      sample.inputs.assign(run.begin() + static_cast<std::ptrdiff_t>(off),
                           run.begin() + static_cast<std::ptrdiff_t>(off + window - 1));
      sample.target = run[off + window - 1][target_index];
      windows.push_back(std::move(sample));
    }
    run.clear();
  };

  for (std::size_t i = 0; i < train.frames.size(); ++i) {
    const auto& frame = train.frames[i];
    std::optional<nn::Vec> x;
    if (train.mask.labels[i] == ingest::MaskLabel::normal)
      x = ingest::normalized_input(frame, params);
    const bool contiguous = run.empty() || frame.timestamp == run_last + kSecondsPerMinute;
    if (!x || !contiguous) harvest();
    if (x) {
      run.push_back(std::move(*x));
      run_last = frame.timestamp;
    }
  }
  harvest();
  return windows;
}

inline std::size_t holdout_count(std::size_t n, double fraction) {
  auto h = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
  h = std::max<std::size_t>(h, 1);
  h = std::min(h, n - 1);
  return h;
}

// One seeded training run over pre-extracted samples. Forward/backward are
// supplied by the caller so dense and LSTM share the loop.
template <class Net, class Sample, class Forward, class Backward>
struct RestartResult {
  Net net;
  double training_mae = 0.0;
  double holdout_mae = 0.0;
};

template <class Net, class Sample, class MakeNet, class Forward, class Backward>
RestartResult<Net, Sample, Forward, Backward> run_restart(
    const std::vector<Sample>& samples, std::size_t holdout, const TrainingConfig& cfg,
    std::uint64_t seed, MakeNet make_net, Forward forward, Backward backward_fn) {
  Rng rng(seed);
  Net net = make_net(rng);
  auto params = nn::param_blocks(net);
  nn::AdamState adam({cfg.learning_rate}, params);

  const std::size_t train_count = samples.size() - holdout;
  std::vector<std::size_t> order(train_count);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    std::size_t at = 0;
    while (at < order.size()) {
      const std::size_t take = std::min(cfg.batch_size, order.size() - at);
      nn::Gradients batch = nn::Gradients::zeros_like(params);
      for (std::size_t k = 0; k < take; ++k) {
        batch.accumulate(backward_fn(net, samples[order[at + k]]));
      }
      batch.scale(1.0 / static_cast<double>(take));
      adam.step(params, batch);
      at += take;
    }
  }

  auto mae_over = [&](std::size_t from, std::size_t to) {
    double acc = 0.0;
    for (std::size_t i = from; i < to; ++i) {
      acc += std::fabs(forward(net, samples[i]) - samples[i].target);
    }
    return to > from ? acc / static_cast<double>(to - from) : 0.0;
  };

  RestartResult<Net, Sample, Forward, Backward> result;
  result.training_mae = mae_over(0, train_count);
  result.holdout_mae = mae_over(train_count, samples.size());
  result.net = std::move(net);
  return result;
}

}  // namespace train_detail

// Trains the same-time dense NOM for one endogenous channel. Runs
// cfg.restarts independent seeded trainings and keeps the one with the lowest
// MAE on the chronologically-last holdout slice, which never receives
// gradient updates.
inline NomModel train_dense_nom(const ingest::Partition& train, const std::string& target,
                                const ingest::Schema& schema, const TrainingConfig& cfg = {}) {
  train_detail::require_endogenous(schema, target);
  const auto params = train_detail::resolve_normalization(train, schema, cfg);
  const std::size_t target_index = schema.index_of(target);

  const auto samples = train_detail::dense_samples(train, target_index, params);
  if (samples.size() < cfg.batch_size) {
    throw InsufficientDataError("dense NOM for " + target + ": " +
                                std::to_string(samples.size()) + " usable samples, need at least " +
                                std::to_string(cfg.batch_size));
  }
  const std::size_t holdout =
      train_detail::holdout_count(samples.size(), cfg.selection_holdout_fraction);

  NomModel model;
  model.kind = ModelKind::dense;
  model.target_channel = target;
  for (const auto& ch : schema.channels()) model.input_channels.push_back(ch.id);
  model.target_index = target_index;
  model.normalization = params;

  const std::size_t width = schema.size();
  auto make_net = [&](Rng& rng) {
    return nn::make_dense_net({width, width, 5, 1}, rng);
  };
  auto forward = [](const nn::DenseNet& net, const train_detail::DenseSample& s) {
    return nn::net_forward_scalar(net, s.input);
  };
  auto backward_fn = [&](const nn::DenseNet& net, const train_detail::DenseSample& s) {
    return nn::backward(net, s.input, s.target, cfg.loss);
  };

  bool have_best = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(r);
    auto result = train_detail::run_restart<nn::DenseNet, train_detail::DenseSample>(
        samples, holdout, cfg, seed, make_net, forward, backward_fn);
    if (!have_best || result.holdout_mae < model.fingerprint.holdout_mae) {
      have_best = true;
      model.dense = std::move(result.net);
      model.fingerprint = {seed, cfg.epochs, result.training_mae, result.holdout_mae};
    }
  }
  return model;
}

// Trains the one-step-ahead LSTM NOM on non-overlapping windows of
// cfg.lstm_window contiguous clean minutes. Hidden and cell states reset to
// zero at each window start.
inline NomModel train_lstm_nom(const ingest::Partition& train, const std::string& target,
                               const ingest::Schema& schema, const TrainingConfig& cfg = {}) {
  train_detail::require_endogenous(schema, target);
  if (cfg.lstm_window < 2) throw ConfigError("lstm_window must be at least 2");
  const auto params = train_detail::resolve_normalization(train, schema, cfg);
  const std::size_t target_index = schema.index_of(target);

  const auto windows =
      train_detail::window_samples(train, target_index, params, cfg.lstm_window);
  if (windows.size() < 2) {
    throw InsufficientDataError("lstm NOM for " + target + ": found " +
                                std::to_string(windows.size()) +
                                " contiguous windows of " + std::to_string(cfg.lstm_window) +
                                " minutes, need at least 2");
  }
  const std::size_t holdout =
      train_detail::holdout_count(windows.size(), cfg.selection_holdout_fraction);

  NomModel model;
  model.kind = ModelKind::lstm;
  model.target_channel = target;
  for (const auto& ch : schema.channels()) model.input_channels.push_back(ch.id);
  model.target_index = target_index;
  model.window_minutes = cfg.lstm_window;
  model.normalization = params;

  const std::size_t width = schema.size();
  auto make_net = [&](Rng& rng) {
    return nn::make_lstm_net(width, cfg.lstm_hidden, {5, 1}, rng);
  };
  auto forward = [](const nn::LstmNet& net, const train_detail::WindowSample& s) {
    return nn::lstm_forward_scalar(net, s.inputs);
  };
  auto backward_fn = [&](const nn::LstmNet& net, const train_detail::WindowSample& s) {
    return nn::backward(net, s.inputs, s.target, cfg.loss);
  };

  bool have_best = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(r);
    auto result = train_detail::run_restart<nn::LstmNet, train_detail::WindowSample>(
        windows, holdout, cfg, seed, make_net, forward, backward_fn);
    if (!have_best || result.holdout_mae < model.fingerprint.holdout_mae) {
      have_best = true;
      model.lstm = std::move(result.net);
      model.fingerprint = {seed, cfg.epochs, result.training_mae, result.holdout_mae};
    }
  }
  return model;
}

}  // namespace windtwin::nom
