#pragma once

#include <cmath>
#include <vector>

#include "windtwin/errors.hpp"
#include "windtwin/nn/gradients.hpp"

namespace windtwin::nn {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moment accumulators mirror the param_blocks()
// layout of the network they were created for.
class AdamState {
 public:
  AdamState(AdamConfig cfg, const std::vector<ParamBlock>& params) : cfg_(cfg) {
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 && cfg.beta2 < 1.0))
      throw ConfigError("adam betas must lie in [0, 1)");
    for (const auto& p : params) {
      m_.emplace_back(p.values.size(), 0.0);
      v_.emplace_back(p.values.size(), 0.0);
    }
  }

  const AdamConfig& config() const { return cfg_; }
  long step_count() const { return step_; }

  void step(std::vector<ParamBlock>& params, const Gradients& grads) {
    check_dims(params.size() == grads.blocks.size() && params.size() == m_.size(), "adam step");
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (std::size_t b = 0; b < params.size(); ++b) {
      auto& values = params[b].values;
      const auto& g = grads.blocks[b];
      check_dims(values.size() == g.size(), "adam step");
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(g[i]))
          throw TrainingError("non-finite gradient in parameter block " + params[b].name);
        m_[b][i] = cfg_.beta1 * m_[b][i] + (1.0 - cfg_.beta1) * g[i];
        v_[b][i] = cfg_.beta2 * v_[b][i] + (1.0 - cfg_.beta2) * g[i] * g[i];
        const double m_hat = m_[b][i] / bc1;
        const double v_hat = v_[b][i] / bc2;
        values[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
      }
    }
  }

 private:
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  long step_ = 0;
};

}  // namespace windtwin::nn
