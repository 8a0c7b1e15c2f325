#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "windtwin/errors.hpp"
#include "windtwin/ingest/frame.hpp"
#include "windtwin/ingest/mask.hpp"

namespace windtwin::ingest {

// Buckets raw samples into wall-clock minutes (floor to minute boundary) and
// averages the non-missing values per channel. A minute with zero raw samples
// is simply absent; a channel with only missing samples inside a minute stays
// missing. The minute carries the last raw status/operational code seen in it.
inline Series average_to_minutes(const Series& raw) {
  Series out;
  if (raw.empty()) return out;
  const std::size_t width = raw.front().values.size();

  std::vector<double> sums(width, 0.0);
  std::vector<std::size_t> counts(width, 0);
  Timestamp bucket = floor_to_minute(raw.front().timestamp);
  int status = 0, oper = 0;

  auto flush = [&]() {
    ScadaFrame frame;
    frame.timestamp = bucket;
    frame.status_code = status;
    frame.operational_code = oper;
    frame.values.resize(width);
    for (std::size_t j = 0; j < width; ++j) {
      if (counts[j] > 0) frame.values[j] = sums[j] / static_cast<double>(counts[j]);
      sums[j] = 0.0;
      counts[j] = 0;
    }
    out.push_back(std::move(frame));
  };

  for (const auto& frame : raw) {
    const Timestamp minute = floor_to_minute(frame.timestamp);
    if (minute != bucket) {
      flush();
      bucket = minute;
    }
    for (std::size_t j = 0; j < width && j < frame.values.size(); ++j) {
      if (frame.values[j]) {
        sums[j] += *frame.values[j];
        ++counts[j];
      }
    }
    status = frame.status_code;
    oper = frame.operational_code;
  }
  flush();
  return out;
}

// A series slice together with its operating labels.
struct Partition {
  Series frames;
  OperatingMask mask;
};

struct Split {
  Partition train;  // fault/reheating timesteps removed
  Partition test;   // untouched chronological tail
};

// Chronological split: the first round(n * train_fraction) frames form the
// training region, the rest the test region. Fault and reheating timesteps are
// dropped from the training partition only.
inline Split split_train_test(const Series& series, const OperatingMask& mask,
                              double train_fraction = 0.6,
                              std::size_t min_train_samples = 1000) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must be in (0, 1)");
  if (mask.labels.size() != series.size())
    throw ConfigError("mask and series have different lengths");

  const auto boundary = static_cast<std::size_t>(
      std::llround(static_cast<double>(series.size()) * train_fraction));

  Split split;
  for (std::size_t i = 0; i < boundary; ++i) {
    if (mask.excluded_from_training(i)) continue;
    split.train.frames.push_back(series[i]);
    split.train.mask.labels.push_back(MaskLabel::normal);
  }
  for (std::size_t i = boundary; i < series.size(); ++i) {
    split.test.frames.push_back(series[i]);
    split.test.mask.labels.push_back(mask.labels[i]);
  }

  if (split.train.frames.size() < min_train_samples) {
    throw InsufficientDataError(
        "training partition has " + std::to_string(split.train.frames.size()) +
        " usable samples, need at least " + std::to_string(min_train_samples));
  }
  return split;
}

// Per-channel [min, max] over the training partition. Applied to test data
// without clamping: values outside [0, 1] are signal, not errors.
struct NormalizationParams {
  std::vector<double> lo, hi;

  double normalize(std::size_t channel, double x) const {
    return (x - lo[channel]) / (hi[channel] - lo[channel]);
  }
  double denormalize(std::size_t channel, double y) const {
    return lo[channel] + y * (hi[channel] - lo[channel]);
  }
  std::size_t size() const { return lo.size(); }
};

inline NormalizationParams fit_normalization(const Series& train, const Schema& schema) {
  if (train.empty()) throw InsufficientDataError("cannot fit normalization on empty partition");
  const std::size_t width = schema.size();
  NormalizationParams params;
  params.lo.assign(width, 0.0);
  params.hi.assign(width, 0.0);
  for (std::size_t j = 0; j < width; ++j) {
    bool seen = false;
    double lo = 0.0, hi = 0.0;
    for (const auto& frame : train) {
      if (!frame.values[j]) continue;
      const double v = *frame.values[j];
      if (!seen) {
        lo = hi = v;
        seen = true;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!seen)
      throw DegenerateChannelError("channel " + schema.at(j).id + " has no values in training data");
    if (!(hi > lo))
      throw DegenerateChannelError("channel " + schema.at(j).id + " is constant (max == min)");
    params.lo[j] = lo;
    params.hi[j] = hi;
  }
  return params;
}

// Full normalized input vector for a frame, or nullopt if any channel is
// missing.
inline std::optional<std::vector<double>> normalized_input(const ScadaFrame& frame,
                                                           const NormalizationParams& params) {
  std::vector<double> x(params.size());
  for (std::size_t j = 0; j < params.size(); ++j) {
    if (!frame.values[j]) return std::nullopt;
    x[j] = params.normalize(j, *frame.values[j]);
  }
  return x;
}

}  // namespace windtwin::ingest
