#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "windtwin/diagnose/report.hpp"
#include "windtwin/errors.hpp"
#include "windtwin/ingest/pipeline.hpp"
#include "windtwin/nom/model.hpp"
#include "windtwin/rng.hpp"

namespace windtwin::diagnose {

// Exact Shapley attribution for a dense NOM output at input x. The value of a
// coalition S is the interventional expectation over the background set:
// features in S take their values from x, the rest from the background sample.
// With 8 inputs the 256 coalitions are enumerated outright.
inline AttributionVector shapley_exact(const nom::NomModel& model, const nn::Vec& x,
                                       std::span<const nn::Vec> background) {
  if (model.kind != nom::ModelKind::dense)
    throw ConfigError("shapley attribution supports dense models only");
  if (background.empty()) throw ConfigError("shapley attribution needs a background set");
  const std::size_t n = x.size();
  if (n != model.input_count() || n > 20)
    throw ConfigError("unexpected feature count for shapley attribution");

  const std::size_t coalitions = std::size_t{1} << n;
  std::vector<double> value(coalitions, 0.0);
  nn::Vec z(n);
  for (std::size_t mask = 0; mask < coalitions; ++mask) {
    double acc = 0.0;
    for (const auto& b : background) {
      for (std::size_t j = 0; j < n; ++j) {
        z[j] = (mask >> j) & 1U ? x[j] : b[j];
      }
      acc += nn::net_forward_scalar(model.dense, z);
    }
    value[mask] = acc / static_cast<double>(background.size());
  }

  // w(s) = s! (n-1-s)! / n! for coalition size s, exact in double for n <= 20.
  std::vector<double> factorial(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) factorial[k] = factorial[k - 1] * static_cast<double>(k);
  std::vector<double> weight(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    weight[s] = factorial[s] * factorial[n - 1 - s] / factorial[n];
  }

  AttributionVector attribution;
  attribution.base_value = value[0];
  attribution.contributions.assign(n, 0.0);
  for (std::size_t mask = 0; mask < coalitions; ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
    for (std::size_t j = 0; j < n; ++j) {
      if ((mask >> j) & 1U) continue;
      attribution.contributions[j] +=
          weight[size] * (value[mask | (std::size_t{1} << j)] - value[mask]);
    }
  }
  return attribution;
}

// Seeded draw of normalized input vectors from the training partition; frames
// with missing values are not candidates.
inline std::vector<nn::Vec> sample_background(const ingest::Partition& train,
                                              const ingest::NormalizationParams& params,
                                              std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < train.frames.size(); ++i) {
    if (train.mask.labels[i] != ingest::MaskLabel::normal) continue;
    bool complete = true;
    for (const auto& v : train.frames[i].values) {
      if (!v) {
        complete = false;
        break;
      }
    }
    if (complete) candidates.push_back(i);
  }
  if (candidates.empty())
    throw CalibrationError("no complete frames available for the shapley background set");

  Rng rng(seed);
  rng.shuffle(candidates);
  if (candidates.size() > count) candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());

  std::vector<nn::Vec> background;
  background.reserve(candidates.size());
  for (const auto i : candidates) {
    background.push_back(*ingest::normalized_input(train.frames[i], params));
  }
  return background;
}

}  // namespace windtwin::diagnose
