#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "windtwin/nn/linalg.hpp"
#include "windtwin/rng.hpp"

namespace windtwin::nn {

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

enum class Activation { relu, identity };

inline std::string_view to_string(Activation a) {
  return a == Activation::relu ? "relu" : "identity";
}

inline Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  throw Error("unknown activation: " + std::string(s));
}

struct DenseLayer {
  Matrix weights;  // out x in
  Vec bias;        // out
  Activation activation = Activation::relu;
};

// y = A(W x + b)
inline Vec dense_forward(const DenseLayer& layer, const Vec& x) {
  Vec y = matvec(layer.weights, x);
  add_inplace(y, layer.bias);
  if (layer.activation == Activation::relu) {
    for (auto& v : y) v = relu(v);
  }
  return y;
}

struct DenseNet {
  std::vector<DenseLayer> layers;

  std::size_t input_size() const { return layers.front().weights.cols(); }
  std::size_t output_size() const { return layers.back().weights.rows(); }
};

// Uniform init in +-sqrt(6 / (fan_in + fan_out)), biases zero.
inline DenseLayer make_dense_layer(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  DenseLayer layer;
  layer.weights = Matrix(out, in);
  layer.bias.assign(out, 0.0);
  layer.activation = act;
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  for (auto& w : layer.weights.data()) w = rng.uniform(-bound, bound);
  return layer;
}

// widths = {input, hidden..., output}; ReLU everywhere except the identity
// output layer.
inline DenseNet make_dense_net(const std::vector<std::size_t>& widths, Rng& rng) {
  if (widths.size() < 2) throw Error("dense net needs at least input and output widths");
  DenseNet net;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool last = (i + 2 == widths.size());
    net.layers.push_back(
        make_dense_layer(widths[i], widths[i + 1], last ? Activation::identity : Activation::relu, rng));
  }
  return net;
}

inline Vec net_forward(const DenseNet& net, const Vec& input) {
  Vec x = input;
  for (const auto& layer : net.layers) x = dense_forward(layer, x);
  return x;
}

inline double net_forward_scalar(const DenseNet& net, const Vec& input) {
  const Vec y = net_forward(net, input);
  check_dims(y.size() == 1, "net_forward_scalar");
  return y[0];
}

struct DenseCache {
  Vec input;
  std::vector<Vec> pre;   // pre-activation per layer
  std::vector<Vec> post;  // activated output per layer
};

inline DenseCache net_forward_cached(const DenseNet& net, const Vec& input) {
  DenseCache cache;
  cache.input = input;
  const Vec* x = &cache.input;
  for (const auto& layer : net.layers) {
    Vec z = matvec(layer.weights, *x);
    add_inplace(z, layer.bias);
    cache.pre.push_back(z);
    if (layer.activation == Activation::relu) {
      for (auto& v : z) v = relu(v);
    }
    cache.post.push_back(std::move(z));
    x = &cache.post.back();
  }
  return cache;
}

struct DenseGrads {
  std::vector<Matrix> d_weights;
  std::vector<Vec> d_bias;
  Vec d_input;
};

// Backprop through the cached forward pass. d_output is dL/dy of the net
// output. ReLU uses subgradient 0 at exactly 0.
inline DenseGrads net_backward(const DenseNet& net, const DenseCache& cache, Vec d_output) {
  DenseGrads grads;
  grads.d_weights.resize(net.layers.size());
  grads.d_bias.resize(net.layers.size());
  Vec upstream = std::move(d_output);
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const auto& layer = net.layers[li];
    Vec dz = upstream;
    if (layer.activation == Activation::relu) {
      for (std::size_t k = 0; k < dz.size(); ++k) {
        if (cache.pre[li][k] <= 0.0) dz[k] = 0.0;
      }
    }
    const Vec& layer_input = (li == 0) ? cache.input : cache.post[li - 1];
    grads.d_weights[li] = Matrix(layer.weights.rows(), layer.weights.cols());
    add_outer(grads.d_weights[li], dz, layer_input);
    grads.d_bias[li] = dz;
    upstream = matvec_transposed(layer.weights, dz);
  }
  grads.d_input = std::move(upstream);
  return grads;
}

}  // namespace windtwin::nn
