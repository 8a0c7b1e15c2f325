#pragma once

#include <cmath>
#include <string_view>

#include "windtwin/errors.hpp"

namespace windtwin::nn {

enum class Loss { mae, mse };

inline std::string_view to_string(Loss l) { return l == Loss::mae ? "mae" : "mse"; }

inline Loss loss_from_string(std::string_view s) {
  if (s == "mae") return Loss::mae;
  if (s == "mse") return Loss::mse;
  throw ConfigError("unknown loss: " + std::string(s));
}

inline double loss_value(Loss loss, double prediction, double target) {
  const double r = prediction - target;
  return loss == Loss::mae ? std::fabs(r) : r * r;
}

// dL/dprediction. MAE uses subgradient 0 at residual exactly 0.
inline double loss_derivative(Loss loss, double prediction, double target) {
  const double r = prediction - target;
  if (loss == Loss::mse) return 2.0 * r;
  if (r > 0.0) return 1.0;
  if (r < 0.0) return -1.0;
  return 0.0;
}

}  // namespace windtwin::nn
