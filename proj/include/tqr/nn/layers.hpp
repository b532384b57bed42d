#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/nn/graph.hpp"
#include "tqr/nn/parameter_store.hpp"
#include "tqr/nn/random.hpp"

namespace tqr::nn {

enum class Activation { none, relu };

// W x + b, optionally rectified.
template <typename T>
Var dense_forward(Graph<T>& g, Var x, Var w, Var b, Activation act) {
  const auto& W = g.value(w);
  const auto& X = g.value(x);
  if (W.rank() != 2 || X.rank() != 1 || W.cols() != X.size()) shape_error("dense_forward", W.shape(), X.shape());
  if (g.value(b).shape() != Shape{W.rows()}) shape_error("dense_forward bias", g.value(b).shape(), Shape{W.rows()});
  Var y = g.add(g.matvec(w, x), b);
  return act == Activation::relu ? g.relu(y) : y;
}

// Row-wise dense layer: X[n x in] -> [n x out].
template <typename T>
Var dense_rows(Graph<T>& g, Var x, Var w, Var b, Activation act) {
  Var y = g.add_row_broadcast(g.matmul_nt(x, w), b);
  return act == Activation::relu ? g.relu(y) : y;
}

// Parameter names of one LSTM direction stored under a common prefix.
struct LstmNames {
  std::string prefix;
  std::string w_x() const { return prefix + ".W_x"; }
  std::string w_h() const { return prefix + ".W_h"; }
  std::string bias() const { return prefix + ".b"; }
};

struct LstmState {
  Var h;
  Var c;
};

// Standard LSTM update with gate order input, forget, candidate, output.
template <typename T>
LstmState lstm_step(Graph<T>& g, Var x, Var h_prev, Var c_prev, const LstmNames& names) {
  Var wx = g.param(names.w_x());
  Var wh = g.param(names.w_h());
  Var b = g.param(names.bias());
  const std::size_t hidden = g.value(wh).cols();
  if (g.value(wx).rows() != 4 * hidden || g.value(wx).cols() != g.value(x).size()) {
    shape_error("lstm_step input", g.value(wx).shape(), g.value(x).shape());
  }
  if (g.value(h_prev).size() != hidden || g.value(c_prev).size() != hidden) {
    shape_error("lstm_step state", g.value(h_prev).shape(), Shape{hidden});
  }
  Var z = g.add(g.add(g.matvec(wx, x), g.matvec(wh, h_prev)), b);
  Var hc = g.lstm_cell(z, c_prev);
  return {g.slice(hc, 0, hidden), g.slice(hc, hidden, hidden)};
}

namespace detail {

template <typename T>
std::vector<Var> lstm_direction(Graph<T>& g, Var inputs, const LstmNames& names, bool reverse) {
  Var wx = g.param(names.w_x());
  Var wh = g.param(names.w_h());
  Var b = g.param(names.bias());
  const std::size_t hidden = g.value(wh).cols();
  const std::size_t n = g.value(inputs).rows();
  if (g.value(wx).cols() != g.value(inputs).cols()) shape_error("lstm_sequence input", g.value(wx).shape(), g.value(inputs).shape());
  Var pre = g.add_row_broadcast(g.matmul_nt(inputs, wx), b);
  Var h = g.constant(Tensor<T>(Shape{hidden}));
  Var c = h;
  std::vector<Var> out(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t t = reverse ? n - 1 - step : step;
    Var z = g.add(g.row(pre, t), g.matvec(wh, h));
    Var hc = g.lstm_cell(z, c);
    h = g.slice(hc, 0, hidden);
    c = g.slice(hc, hidden, hidden);
    out[t] = h;
  }
  return out;
}

}  // namespace detail

// Runs an LSTM over the rows of `inputs` from a zero state. Returns a matrix
// with one row per step; bidirectional runs concatenate [forward ; backward].
template <typename T>
Var lstm_sequence(Graph<T>& g, Var inputs, const LstmNames& forward, const LstmNames* backward = nullptr) {
  const auto& X = g.value(inputs);
  if (X.rank() != 2 || X.rows() == 0) throw ContractViolation("lstm_sequence: empty input sequence");
  auto fwd = detail::lstm_direction(g, inputs, forward, false);
  if (!backward) return g.stack_rows(fwd);
  auto bwd = detail::lstm_direction(g, inputs, *backward, true);
  std::vector<Var> rows(fwd.size());
  for (std::size_t t = 0; t < fwd.size(); ++t) rows[t] = g.concat({fwd[t], bwd[t]});
  return g.stack_rows(rows);
}

// ---- initialization -----------------------------------------------------

template <typename T>
Tensor<T> uniform_tensor(Shape shape, double bound, Rng& rng) {
  Tensor<T> t(std::move(shape));
  for (auto& v : t.values()) v = static_cast<T>(rng.uniform(-bound, bound));
  return t;
}

template <typename T>
void init_dense(ParameterStore<T>& store, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(in));
  store.add(prefix + ".W", uniform_tensor<T>({out, in}, bound, rng));
  store.add(prefix + ".b", Tensor<T>(Shape{out}));
}

// Forget-gate bias starts at 1.
template <typename T>
void init_lstm(ParameterStore<T>& store, const LstmNames& names, std::size_t in, std::size_t hidden, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  store.add(names.w_x(), uniform_tensor<T>({4 * hidden, in}, bound, rng));
  store.add(names.w_h(), uniform_tensor<T>({4 * hidden, hidden}, bound, rng));
  Tensor<T> b(Shape{4 * hidden});
  for (std::size_t k = hidden; k < 2 * hidden; ++k) b[k] = T(1);
  store.add(names.bias(), std::move(b));
}

}  // namespace tqr::nn
