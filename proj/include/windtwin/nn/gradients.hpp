#pragma once

#include <span>
#include <string>
#include <vector>

#include "windtwin/nn/dense.hpp"
#include "windtwin/nn/loss.hpp"
#include "windtwin/nn/lstm.hpp"

namespace windtwin::nn {

// Named view over one parameter tensor. The block order returned by
// param_blocks() is the canonical flattening used by the optimizer and the
// gradient checks.
struct ParamBlock {
  std::string name;
  std::span<double> values;
};

inline std::vector<ParamBlock> param_blocks(DenseNet& net) {
  std::vector<ParamBlock> blocks;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    auto& layer = net.layers[li];
    const std::string prefix = "layer" + std::to_string(li);
    blocks.push_back({prefix + "/weights", layer.weights.data()});
    blocks.push_back({prefix + "/bias", layer.bias});
  }
  return blocks;
}

inline std::vector<ParamBlock> param_blocks(LstmNet& net) {
  std::vector<ParamBlock> blocks;
  auto& c = net.cell;
  blocks.push_back({"cell/w_forget", c.w_forget.data()});
  blocks.push_back({"cell/w_input", c.w_input.data()});
  blocks.push_back({"cell/w_output", c.w_output.data()});
  blocks.push_back({"cell/w_cell", c.w_cell.data()});
  blocks.push_back({"cell/u_forget", c.u_forget.data()});
  blocks.push_back({"cell/u_input", c.u_input.data()});
  blocks.push_back({"cell/u_output", c.u_output.data()});
  blocks.push_back({"cell/u_cell", c.u_cell.data()});
  blocks.push_back({"cell/b_forget", c.b_forget});
  blocks.push_back({"cell/b_input", c.b_input});
  blocks.push_back({"cell/b_output", c.b_output});
  blocks.push_back({"cell/b_cell", c.b_cell});
  for (std::size_t li = 0; li < net.head.layers.size(); ++li) {
    auto& layer = net.head.layers[li];
    const std::string prefix = "head" + std::to_string(li);
    blocks.push_back({prefix + "/weights", layer.weights.data()});
    blocks.push_back({prefix + "/bias", layer.bias});
  }
  return blocks;
}

// Gradients flattened into the param_blocks() layout.
struct Gradients {
  std::vector<std::string> names;
  std::vector<std::vector<double>> blocks;

  static Gradients zeros_like(const std::vector<ParamBlock>& params) {
    Gradients g;
    for (const auto& p : params) {
      g.names.push_back(p.name);
      g.blocks.emplace_back(p.values.size(), 0.0);
    }
    return g;
  }

  void accumulate(const Gradients& other) {
    check_dims(blocks.size() == other.blocks.size(), "gradient accumulate");
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      check_dims(blocks[b].size() == other.blocks[b].size(), "gradient accumulate");
      for (std::size_t i = 0; i < blocks[b].size(); ++i) blocks[b][i] += other.blocks[b][i];
    }
  }

  void scale(double factor) {
    for (auto& block : blocks) {
      for (auto& v : block) v *= factor;
    }
  }
};

// Loss gradients for one sample on a single-output dense network.
inline Gradients backward(const DenseNet& net, const Vec& input, double target, Loss loss) {
  const auto cache = net_forward_cached(net, input);
  check_dims(cache.post.back().size() == 1, "dense backward");
  const double prediction = cache.post.back()[0];
  const auto grads = net_backward(net, cache, Vec{loss_derivative(loss, prediction, target)});

  Gradients out;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const std::string prefix = "layer" + std::to_string(li);
    out.names.push_back(prefix + "/weights");
    out.blocks.push_back(grads.d_weights[li].data());
    out.names.push_back(prefix + "/bias");
    out.blocks.push_back(grads.d_bias[li]);
  }
  return out;
}

// Loss gradients for one sequence window; BPTT over the whole window.
inline Gradients backward(const LstmNet& net, std::span<const Vec> sequence, double target,
                          Loss loss) {
  const auto cache = lstm_forward_cached(net, sequence);
  check_dims(cache.head.post.back().size() == 1, "lstm backward");
  const double prediction = cache.head.post.back()[0];
  const auto grads =
      lstm_backward(net, cache, Vec{loss_derivative(loss, prediction, target)});

  Gradients out;
  auto push = [&](const std::string& name, std::vector<double> values) {
    out.names.push_back(name);
    out.blocks.push_back(std::move(values));
  };
  push("cell/w_forget", grads.dw_forget.data());
  push("cell/w_input", grads.dw_input.data());
  push("cell/w_output", grads.dw_output.data());
  push("cell/w_cell", grads.dw_cell.data());
  push("cell/u_forget", grads.du_forget.data());
  push("cell/u_input", grads.du_input.data());
  push("cell/u_output", grads.du_output.data());
  push("cell/u_cell", grads.du_cell.data());
  push("cell/b_forget", grads.db_forget);
  push("cell/b_input", grads.db_input);
  push("cell/b_output", grads.db_output);
  push("cell/b_cell", grads.db_cell);
  for (std::size_t li = 0; li < net.head.layers.size(); ++li) {
    const std::string prefix = "head" + std::to_string(li);
    push(prefix + "/weights", grads.head.d_weights[li].data());
    push(prefix + "/bias", grads.head.d_bias[li]);
  }
  return out;
}

}  // namespace windtwin::nn
