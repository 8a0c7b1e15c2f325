#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "windtwin/nn/dense.hpp"
#include "windtwin/nn/linalg.hpp"
#include "windtwin/rng.hpp"

namespace windtwin::nn {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// One LSTM layer. Gate activations: logistic sigmoid for the forget, input and
// output gates, tanh for the cell candidate and cell output.
struct LstmLayer {
  Matrix w_forget, w_input, w_output, w_cell;  // hidden x input
  Matrix u_forget, u_input, u_output, u_cell;  // hidden x hidden
  Vec b_forget, b_input, b_output, b_cell;     // hidden

  std::size_t hidden_size() const { return b_forget.size(); }
  std::size_t input_size() const { return w_forget.cols(); }
};

inline LstmLayer make_lstm_layer(std::size_t input, std::size_t hidden, Rng& rng) {
  LstmLayer layer;
  const double wb = std::sqrt(6.0 / static_cast<double>(input + hidden));
  const double ub = std::sqrt(6.0 / static_cast<double>(hidden + hidden));
  auto init = [&](Matrix& m, std::size_t r, std::size_t c, double bound) {
    m = Matrix(r, c);
    for (auto& w : m.data()) w = rng.uniform(-bound, bound);
  };
  init(layer.w_forget, hidden, input, wb);
  init(layer.w_input, hidden, input, wb);
  init(layer.w_output, hidden, input, wb);
  init(layer.w_cell, hidden, input, wb);
  init(layer.u_forget, hidden, hidden, ub);
  init(layer.u_input, hidden, hidden, ub);
  init(layer.u_output, hidden, hidden, ub);
  init(layer.u_cell, hidden, hidden, ub);
  layer.b_forget.assign(hidden, 0.0);
  layer.b_input.assign(hidden, 0.0);
  layer.b_output.assign(hidden, 0.0);
  layer.b_cell.assign(hidden, 0.0);
  return layer;
}

struct LstmStepCache {
  Vec x, h_prev, c_prev;
  Vec f, i, o, g;  // gate activations; g is the tanh cell candidate
  Vec c, h, tanh_c;
};

inline LstmStepCache lstm_step_cached(const LstmLayer& layer, const Vec& x, const Vec& h_prev,
                                      const Vec& c_prev) {
  check_dims(x.size() == layer.input_size() && h_prev.size() == layer.hidden_size() &&
                 c_prev.size() == layer.hidden_size(),
             "lstm_step");
  const std::size_t n = layer.hidden_size();
  LstmStepCache s;
  s.x = x;
  s.h_prev = h_prev;
  s.c_prev = c_prev;

  auto gate = [&](const Matrix& w, const Matrix& u, const Vec& b) {
    Vec z = matvec(w, x);
    add_inplace(z, matvec(u, h_prev));
    add_inplace(z, b);
    return z;
  };
  s.f = gate(layer.w_forget, layer.u_forget, layer.b_forget);
  s.i = gate(layer.w_input, layer.u_input, layer.b_input);
  s.o = gate(layer.w_output, layer.u_output, layer.b_output);
  s.g = gate(layer.w_cell, layer.u_cell, layer.b_cell);
  for (std::size_t k = 0; k < n; ++k) {
    s.f[k] = sigmoid(s.f[k]);
    s.i[k] = sigmoid(s.i[k]);
    s.o[k] = sigmoid(s.o[k]);
    s.g[k] = std::tanh(s.g[k]);
  }
  s.c.resize(n);
  s.h.resize(n);
  s.tanh_c.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    s.c[k] = s.f[k] * c_prev[k] + s.i[k] * s.g[k];
    s.tanh_c[k] = std::tanh(s.c[k]);
    s.h[k] = s.o[k] * s.tanh_c[k];
  }
  return s;
}

// c_t = f . c_prev + i . tanh(W_c x + U_c h_prev + b_c); h_t = o . tanh(c_t)
inline void lstm_step(const LstmLayer& layer, const Vec& x, const Vec& h_prev, const Vec& c_prev,
                      Vec& h_out, Vec& c_out) {
  auto s = lstm_step_cached(layer, x, h_prev, c_prev);
  h_out = std::move(s.h);
  c_out = std::move(s.c);
}

// LSTM cell followed by a dense head that reads the final hidden state.
struct LstmNet {
  LstmLayer cell;
  DenseNet head;
};

inline LstmNet make_lstm_net(std::size_t input, std::size_t hidden,
                             const std::vector<std::size_t>& head_widths, Rng& rng) {
  LstmNet net;
  net.cell = make_lstm_layer(input, hidden, rng);
  std::vector<std::size_t> widths;
  widths.push_back(hidden);
  widths.insert(widths.end(), head_widths.begin(), head_widths.end());
  net.head = make_dense_net(widths, rng);
  return net;
}

struct LstmCache {
  std::vector<LstmStepCache> steps;
  DenseCache head;
};

// Hidden and cell states start at zero for every sequence.
inline LstmCache lstm_forward_cached(const LstmNet& net, std::span<const Vec> sequence) {
  check_dims(!sequence.empty(), "lstm_forward");
  LstmCache cache;
  Vec h(net.cell.hidden_size(), 0.0), c(net.cell.hidden_size(), 0.0);
  for (const auto& x : sequence) {
    cache.steps.push_back(lstm_step_cached(net.cell, x, h, c));
    h = cache.steps.back().h;
    c = cache.steps.back().c;
  }
  cache.head = net_forward_cached(net.head, h);
  return cache;
}

inline double lstm_forward_scalar(const LstmNet& net, std::span<const Vec> sequence) {
  const auto cache = lstm_forward_cached(net, sequence);
  check_dims(cache.head.post.back().size() == 1, "lstm_forward_scalar");
  return cache.head.post.back()[0];
}

struct LstmGrads {
  Matrix dw_forget, dw_input, dw_output, dw_cell;
  Matrix du_forget, du_input, du_output, du_cell;
  Vec db_forget, db_input, db_output, db_cell;
  DenseGrads head;
};

// Backpropagation through time over the full cached sequence.
inline LstmGrads lstm_backward(const LstmNet& net, const LstmCache& cache, Vec d_output) {
  const std::size_t n = net.cell.hidden_size();
  LstmGrads g;
  auto zeros_like = [](const Matrix& m) { return Matrix(m.rows(), m.cols()); };
  g.dw_forget = zeros_like(net.cell.w_forget);
  g.dw_input = zeros_like(net.cell.w_input);
  g.dw_output = zeros_like(net.cell.w_output);
  g.dw_cell = zeros_like(net.cell.w_cell);
  g.du_forget = zeros_like(net.cell.u_forget);
  g.du_input = zeros_like(net.cell.u_input);
  g.du_output = zeros_like(net.cell.u_output);
  g.du_cell = zeros_like(net.cell.u_cell);
  g.db_forget.assign(n, 0.0);
  g.db_input.assign(n, 0.0);
  g.db_output.assign(n, 0.0);
  g.db_cell.assign(n, 0.0);

  g.head = net_backward(net.head, cache.head, std::move(d_output));

  Vec dh = g.head.d_input;     // gradient flowing into h_t
  Vec dc(n, 0.0);              // gradient flowing into c_t
  for (std::size_t t = cache.steps.size(); t-- > 0;) {
    const auto& s = cache.steps[t];
    Vec dzf(n), dzi(n), dzo(n), dzg(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double d_o = dh[k] * s.tanh_c[k];
      dc[k] += dh[k] * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
      const double d_f = dc[k] * s.c_prev[k];
      const double d_i = dc[k] * s.g[k];
      const double d_g = dc[k] * s.i[k];
      dzo[k] = d_o * s.o[k] * (1.0 - s.o[k]);
      dzf[k] = d_f * s.f[k] * (1.0 - s.f[k]);
      dzi[k] = d_i * s.i[k] * (1.0 - s.i[k]);
      dzg[k] = d_g * (1.0 - s.g[k] * s.g[k]);
    }
    add_outer(g.dw_forget, dzf, s.x);
    add_outer(g.dw_input, dzi, s.x);
    add_outer(g.dw_output, dzo, s.x);
    add_outer(g.dw_cell, dzg, s.x);
    add_outer(g.du_forget, dzf, s.h_prev);
    add_outer(g.du_input, dzi, s.h_prev);
    add_outer(g.du_output, dzo, s.h_prev);
    add_outer(g.du_cell, dzg, s.h_prev);
    add_inplace(g.db_forget, dzf);
    add_inplace(g.db_input, dzi);
    add_inplace(g.db_output, dzo);
    add_inplace(g.db_cell, dzg);

    Vec dh_prev = matvec_transposed(net.cell.u_forget, dzf);
    add_inplace(dh_prev, matvec_transposed(net.cell.u_input, dzi));
    add_inplace(dh_prev, matvec_transposed(net.cell.u_output, dzo));
    add_inplace(dh_prev, matvec_transposed(net.cell.u_cell, dzg));
    for (std::size_t k = 0; k < n; ++k) dc[k] *= s.f[k];
    dh = std::move(dh_prev);
  }
  return g;
}

}  // namespace windtwin::nn
