#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/nn/parameter_store.hpp"
#include "tqr/nn/tensor.hpp"

namespace tqr::nn {

// Floor applied before taking logs of probabilities.
inline constexpr double kLogFloor = 1e-12;

// Handle to a node recorded on a Graph.
struct Var {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t id = npos;
  bool valid() const { return id != npos; }
};

// Reverse-mode tape. Every op evaluates eagerly and records a closure that
// propagates the output gradient to its inputs. Parameter leaves pull their
// value from a ParameterStore and push their gradient back into it on
// backward().
template <typename T>
class Graph {
 public:
  explicit Graph(ParameterStore<T>* store = nullptr) : store_(store) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  ParameterStore<T>* store() const { return store_; }

  Var constant(Tensor<T> value) { return push(std::move(value), {}, nullptr, false); }

  // Leaf bound to a named parameter; repeated calls return the same node.
  Var param(const std::string& name) {
    if (!store_) throw ContractViolation("graph: param('" + name + "') without a parameter store");
    auto it = param_nodes_.find(name);
    if (it != param_nodes_.end()) return it->second;
    Var v = push(store_->value(name), {}, nullptr, true);
    param_nodes_.emplace(name, v);
    return v;
  }

  const Tensor<T>& value(Var v) const { return node(v).value; }

  // Gradient of the last backward() target with respect to v (zeros if v did
  // not participate).
  Tensor<T> grad(Var v) const {
    const Node& n = node(v);
    if (n.grad.empty()) return Tensor<T>(n.value.shape());
    return n.grad;
  }

  std::size_t size() const { return nodes_.size(); }

  // Back-propagates from a scalar node and accumulates parameter gradients
  // into the store.
  void backward(Var loss) {
    const Node& out = node(loss);
    if (out.value.size() != 1) {
      throw ContractViolation("graph: backward() needs a scalar, got shape " + shape_string(out.value.shape()));
    }
    for (Node& n : nodes_) {
      if (n.needs_grad) n.grad = Tensor<T>(n.value.shape());
    }
    if (!nodes_[loss.id].needs_grad) return;
    nodes_[loss.id].grad[0] = T(1);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.needs_grad && n.backward) n.backward(*this, i);
    }
    for (const auto& [name, v] : param_nodes_) {
      auto& acc = store_->at(name).grad;
      const auto& g = nodes_[v.id].grad;
      for (std::size_t k = 0; k < g.size(); ++k) acc[k] += g[k];
    }
  }

  // ---- elementwise ------------------------------------------------------

  Var add(Var a, Var b) {
    const auto& x = value(a);
    const auto& y = value(b);
    if (x.shape() != y.shape()) shape_error("add", x.shape(), y.shape());
    Tensor<T> out(x.shape());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = x[k] + y[k];
    return push(std::move(out), {a.id, b.id}, [](Graph& g, std::size_t self) {
      const auto& gy = g.nodes_[self].grad;
      for (std::size_t in : g.nodes_[self].inputs) {
        if (!g.nodes_[in].needs_grad) continue;
        auto& gx = g.nodes_[in].grad;
        for (std::size_t k = 0; k < gy.size(); ++k) gx[k] += gy[k];
      }
    });
  }

  Var mul(Var a, Var b) {
    const auto& x = value(a);
    const auto& y = value(b);
    if (x.shape() != y.shape()) shape_error("mul", x.shape(), y.shape());
    Tensor<T> out(x.shape());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = x[k] * y[k];
    return push(std::move(out), {a.id, b.id}, [](Graph& g, std::size_t self) {
      const auto& n = g.nodes_[self];
      const auto& gy = n.grad;
      Node& na = g.nodes_[n.inputs[0]];
      Node& nb = g.nodes_[n.inputs[1]];
      if (na.needs_grad) {
        for (std::size_t k = 0; k < gy.size(); ++k) na.grad[k] += gy[k] * nb.value[k];
      }
      if (nb.needs_grad) {
        for (std::size_t k = 0; k < gy.size(); ++k) nb.grad[k] += gy[k] * na.value[k];
      }
    });
  }

  Var scale(Var a, T factor) {
    Tensor<T> out = value(a);
    for (auto& v : out.values()) v *= factor;
    return push(std::move(out), {a.id}, [factor](Graph& g, std::size_t self) {
      const auto& n = g.nodes_[self];
      auto& gx = g.nodes_[n.inputs[0]].grad;
      for (std::size_t k = 0; k < n.grad.size(); ++k) gx[k] += factor * n.grad[k];
    });
  }

  Var relu(Var a) {
    Tensor<T> out = value(a);
    for (auto& v : out.values()) v = v > T(0) ? v : T(0);
    return push(std::move(out), {a.id}, [](Graph& g, std::size_t self) {
      const auto& n = g.nodes_[self];
      auto& gx = g.nodes_[n.inputs[0]].grad;
      for (std::size_t k = 0; k < n.grad.size(); ++k) {
        if (n.value[k] > T(0)) gx[k] += n.grad[k];
      }
    });
  }

  Var sigmoid(Var a) {
    Tensor<T> out = value(a);
    for (auto& v : out.values()) v = sigmoid_value(v);
    return push(std::move(out), {a.id}, [](Graph& g, std::size_t self) {
      const auto& n = g.nodes_[self];
      auto& gx = g.nodes_[n.inputs[0]].grad;
      for (std::size_t k = 0; k < n.grad.size(); ++k) {
        T s = n.value[k];
        gx[k] += n.grad[k] * s * (T(1) - s);
      }
    });
  }

  Var tanh(Var a) {
    Tensor<T> out = value(a);
    for (auto& v : out.values()) v = std::tanh(v);
    return push(std::move(out), {a.id}, [](Graph& g, std::size_t self) {
      const auto& n = g.nodes_[self];
      auto& gx = g.nodes_[n.inputs[0]].grad;
      for (std::size_t k = 0; k < n.grad.size(); ++k) {
        T t = n.value[k];
        gx[k] += n.grad[k] * (T(1) - t * t);
      }
    });
  }

  // ---- linear algebra ---------------------------------------------------

  // W[n x m] * x[m] -> [n]
  Var matvec(Var w, Var x) {
    const auto& W = value(w);
    const auto& X = value(x);
    if (W.rank() != 2 || X.rank() != 1 || W.cols() != X.size()) shape_error("matvec", W.shape(), X.shape());
    const std::size_t n = W.rows(), m = W.cols();
    Tensor<T> out(Shape{n});
    for (std::size_t i = 0; i < n; ++i) {
      T acc = T(0);
      const T* wr = &W[i * m];
      for (std::size_t j = 0; j < m; ++j) acc += wr[j] * X[j];
      out[i] = acc;
    }
    return push(std::move(out), {w.id, x.id}, [n, m](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      const auto& gy = node.grad;
      Node& nw = g.nodes_[node.inputs[0]];
      Node& nx = g.nodes_[node.inputs[1]];
      if (nw.needs_grad) {
        for (std::size_t i = 0; i < n; ++i) {
          T gi = gy[i];
          if (gi == T(0)) continue;
          T* gw = &nw.grad[i * m];
          for (std::size_t j = 0; j < m; ++j) gw[j] += gi * nx.value[j];
        }
      }
      if (nx.needs_grad) {
        for (std::size_t i = 0; i < n; ++i) {
          T gi = gy[i];
          const T* wr = &nw.value[i * m];
          for (std::size_t j = 0; j < m; ++j) nx.grad[j] += gi * wr[j];
        }
      }
    });
  }

  // x[n] * M[n x m] -> [m], i.e. M^T x.
  Var vecmat(Var x, Var mat) {
    const auto& X = value(x);
    const auto& M = value(mat);
    if (M.rank() != 2 || X.rank() != 1 || M.rows() != X.size()) shape_error("vecmat", X.shape(), M.shape());
    const std::size_t n = M.rows(), m = M.cols();
    Tensor<T> out(Shape{m});
    for (std::size_t i = 0; i < n; ++i) {
      const T* mr = &M[i * m];
      for (std::size_t j = 0; j < m; ++j) out[j] += X[i] * mr[j];
    }
    return push(std::move(out), {x.id, mat.id}, [n, m](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      const auto& gy = node.grad;
      Node& nx = g.nodes_[node.inputs[0]];
      Node& nm = g.nodes_[node.inputs[1]];
      for (std::size_t i = 0; i < n; ++i) {
        const T* mr = &nm.value[i * m];
        if (nx.needs_grad) {
          T acc = T(0);
          for (std::size_t j = 0; j < m; ++j) acc += mr[j] * gy[j];
          nx.grad[i] += acc;
        }
        if (nm.needs_grad) {
          T* gm = &nm.grad[i * m];
          for (std::size_t j = 0; j < m; ++j) gm[j] += nx.value[i] * gy[j];
        }
      }
    });
  }

  // A[r x k] * B[k x c] -> [r x c]
  Var matmul(Var a, Var b) {
    const auto& A = value(a);
    const auto& B = value(b);
    if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.rows()) shape_error("matmul", A.shape(), B.shape());
    const std::size_t r = A.rows(), k = A.cols(), c = B.cols();
    Tensor<T> out(Shape{r, c});
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        T av = A[i * k + p];
        if (av == T(0)) continue;
        const T* br = &B[p * c];
        T* orow = &out[i * c];
        for (std::size_t j = 0; j < c; ++j) orow[j] += av * br[j];
      }
    }
    return push(std::move(out), {a.id, b.id}, [r, k, c](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      const auto& gy = node.grad;
      Node& na = g.nodes_[node.inputs[0]];
      Node& nb = g.nodes_[node.inputs[1]];
      for (std::size_t i = 0; i < r; ++i) {
        const T* gr = &gy[i * c];
        for (std::size_t p = 0; p < k; ++p) {
          if (na.needs_grad) {
            const T* br = &nb.value[p * c];
            T acc = T(0);
            for (std::size_t j = 0; j < c; ++j) acc += gr[j] * br[j];
            na.grad[i * k + p] += acc;
          }
          if (nb.needs_grad) {
            T av = na.value[i * k + p];
            T* gb = &nb.grad[p * c];
            for (std::size_t j = 0; j < c; ++j) gb[j] += av * gr[j];
          }
        }
      }
    });
  }

  // A[r x k] * B[c x k]^T -> [r x c]
  Var matmul_nt(Var a, Var b) {
    const auto& A = value(a);
    const auto& B = value(b);
    if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.cols()) shape_error("matmul_nt", A.shape(), B.shape());
    const std::size_t r = A.rows(), k = A.cols(), c = B.rows();
    Tensor<T> out(Shape{r, c});
    for (std::size_t i = 0; i < r; ++i) {
      const T* ar = &A[i * k];
      for (std::size_t j = 0; j < c; ++j) {
        const T* br = &B[j * k];
        T acc = T(0);
        for (std::size_t p = 0; p < k; ++p) acc += ar[p] * br[p];
        out[i * c + j] = acc;
      }
    }
    return push(std::move(out), {a.id, b.id}, [r, k, c](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      const auto& gy = node.grad;
      Node& na = g.nodes_[node.inputs[0]];
      Node& nb = g.nodes_[node.inputs[1]];
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
          T gij = gy[i * c + j];
          if (gij == T(0)) continue;
          if (na.needs_grad) {
            const T* br = &nb.value[j * k];
            T* ga = &na.grad[i * k];
            for (std::size_t p = 0; p < k; ++p) ga[p] += gij * br[p];
          }
          if (nb.needs_grad) {
            const T* ar = &na.value[i * k];
            T* gb = &nb.grad[j * k];
            for (std::size_t p = 0; p < k; ++p) gb[p] += gij * ar[p];
          }
        }
      }
    });
  }

  // M[r x c] + v[c] broadcast over rows.
  Var add_row_broadcast(Var mat, Var vec) {
    const auto& M = value(mat);
    const auto& v = value(vec);
    if (M.rank() != 2 || v.rank() != 1 || M.cols() != v.size()) shape_error("add_row_broadcast", M.shape(), v.shape());
    Tensor<T> out = M;
    const std::size_t r = M.rows(), c = M.cols();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) out[i * c + j] += v[j];
    return push(std::move(out), {mat.id, vec.id}, [r, c](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      Node& nm = g.nodes_[node.inputs[0]];
      Node& nv = g.nodes_[node.inputs[1]];
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
          T gy = node.grad[i * c + j];
          if (nm.needs_grad) nm.grad[i * c + j] += gy;
          if (nv.needs_grad) nv.grad[j] += gy;
        }
      }
    });
  }

  Var dot(Var a, Var b) {
    const auto& x = value(a);
    const auto& y = value(b);
    if (x.rank() != 1 || x.shape() != y.shape()) shape_error("dot", x.shape(), y.shape());
    T acc = T(0);
    for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * y[k];
    return push(Tensor<T>::scalar(acc), {a.id, b.id}, [](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      T gy = node.grad[0];
      Node& na = g.nodes_[node.inputs[0]];
      Node& nb = g.nodes_[node.inputs[1]];
      for (std::size_t k = 0; k < na.value.size(); ++k) {
        if (na.needs_grad) na.grad[k] += gy * nb.value[k];
        if (nb.needs_grad) nb.grad[k] += gy * na.value[k];
      }
    });
  }

  // ---- structure --------------------------------------------------------

  // Concatenates rank-1 tensors.
  Var concat(std::span<const Var> parts) {
    std::vector<std::size_t> ids;
    std::size_t total = 0;
    for (Var p : parts) {
      if (value(p).rank() != 1) throw ContractViolation("concat: expects vectors, got " + shape_string(value(p).shape()));
      total += value(p).size();
      ids.push_back(p.id);
    }
    Tensor<T> out(Shape{total});
    std::size_t off = 0;
    for (Var p : parts) {
      const auto& v = value(p);
      std::copy(v.values().begin(), v.values().end(), out.values().begin() + off);
      off += v.size();
    }
    return push(std::move(out), std::move(ids), [](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      std::size_t off = 0;
      for (std::size_t in : node.inputs) {
        Node& ni = g.nodes_[in];
        if (ni.needs_grad) {
          for (std::size_t k = 0; k < ni.value.size(); ++k) ni.grad[k] += node.grad[off + k];
        }
        off += ni.value.size();
      }
    });
  }

  Var concat(std::initializer_list<Var> parts) { return concat(std::span<const Var>(parts.begin(), parts.size())); }

  // Concatenates matrices with equal row counts along the column axis.
  Var hconcat(std::span<const Var> parts) {
    if (parts.empty()) throw ContractViolation("hconcat: no inputs");
    const std::size_t rows = value(parts[0]).rows();
    std::vector<std::size_t> ids, widths;
    std::size_t total = 0;
    for (Var p : parts) {
      const auto& v = value(p);
      if (v.rank() != 2 || v.rows() != rows) shape_error("hconcat", value(parts[0]).shape(), v.shape());
      ids.push_back(p.id);
      widths.push_back(v.cols());
      total += v.cols();
    }
    Tensor<T> out(Shape{rows, total});
    std::size_t off = 0;
    for (std::size_t q = 0; q < parts.size(); ++q) {
      const auto& v = value(parts[q]);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < widths[q]; ++j) out[i * total + off + j] = v[i * widths[q] + j];
      off += widths[q];
    }
    return push(std::move(out), std::move(ids), [rows, total, widths](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      std::size_t off = 0;
      for (std::size_t q = 0; q < node.inputs.size(); ++q) {
        Node& ni = g.nodes_[node.inputs[q]];
        if (ni.needs_grad) {
          for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < widths[q]; ++j) ni.grad[i * widths[q] + j] += node.grad[i * total + off + j];
        }
        off += widths[q];
      }
    });
  }

  Var hconcat(std::initializer_list<Var> parts) { return hconcat(std::span<const Var>(parts.begin(), parts.size())); }

  Var slice(Var a, std::size_t begin, std::size_t length) {
    const auto& v = value(a);
    if (v.rank() != 1 || begin + length > v.size()) {
      throw ContractViolation("slice: [" + std::to_string(begin) + ", +" + std::to_string(length) + ") outside " +
                              shape_string(v.shape()));
    }
    std::vector<T> data(v.values().begin() + begin, v.values().begin() + begin + length);
    return push(Tensor<T>::vector(std::move(data)), {a.id}, [begin](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      auto& gx = g.nodes_[node.inputs[0]].grad;
      for (std::size_t k = 0; k < node.grad.size(); ++k) gx[begin + k] += node.grad[k];
    });
  }

  Var row(Var mat, std::size_t index) {
    const auto& M = value(mat);
    if (M.rank() != 2 || index >= M.rows()) {
      throw ContractViolation("row: index " + std::to_string(index) + " outside " + shape_string(M.shape()));
    }
    const std::size_t c = M.cols();
    auto r = M.row(index);
    return push(Tensor<T>::vector(std::vector<T>(r.begin(), r.end())), {mat.id},
                [index, c](Graph& g, std::size_t self) {
                  const auto& node = g.nodes_[self];
                  auto& gm = g.nodes_[node.inputs[0]].grad;
                  for (std::size_t k = 0; k < c; ++k) gm[index * c + k] += node.grad[k];
                });
  }

  Var stack_rows(std::span<const Var> rows) {
    if (rows.empty()) throw ContractViolation("stack_rows: no inputs");
    const std::size_t c = value(rows[0]).size();
    std::vector<std::size_t> ids;
    Tensor<T> out(Shape{rows.size(), c});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& v = value(rows[i]);
      if (v.rank() != 1 || v.size() != c) shape_error("stack_rows", value(rows[0]).shape(), v.shape());
      std::copy(v.values().begin(), v.values().end(), out.row(i).begin());
      ids.push_back(rows[i].id);
    }
    return push(std::move(out), std::move(ids), [c](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      for (std::size_t i = 0; i < node.inputs.size(); ++i) {
        Node& ni = g.nodes_[node.inputs[i]];
        if (!ni.needs_grad) continue;
        for (std::size_t k = 0; k < c; ++k) ni.grad[k] += node.grad[i * c + k];
      }
    });
  }

  Var sum(std::span<const Var> scalars) {
    T acc = T(0);
    std::vector<std::size_t> ids;
    for (Var s : scalars) {
      if (value(s).size() != 1) throw ContractViolation("sum: expects scalars, got " + shape_string(value(s).shape()));
      acc += value(s)[0];
      ids.push_back(s.id);
    }
    return push(Tensor<T>::scalar(acc), std::move(ids), [](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      for (std::size_t in : node.inputs) {
        if (g.nodes_[in].needs_grad) g.nodes_[in].grad[0] += node.grad[0];
      }
    });
  }

  // ---- normalization and loss -------------------------------------------

  // Softmax over a vector; masked-out (false) positions get exactly 0.
  Var softmax(Var logits, const std::vector<bool>* mask = nullptr) {
    Tensor<T> out = value(logits);
    if (out.rank() != 1) throw ContractViolation("softmax: expects a vector, got " + shape_string(out.shape()));
    softmax_inplace(out.values(), mask);
    return push(std::move(out), {logits.id}, [](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      softmax_backward(node.value.values(), node.grad.values(), g.nodes_[node.inputs[0]].grad.values());
    });
  }

  // Row-wise softmax of a matrix.
  Var row_softmax(Var mat) {
    Tensor<T> out = value(mat);
    if (out.rank() != 2) throw ContractViolation("row_softmax: expects a matrix, got " + shape_string(out.shape()));
    for (std::size_t i = 0; i < out.rows(); ++i) softmax_inplace(out.row(i), nullptr);
    return push(std::move(out), {mat.id}, [](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      auto& gx = g.nodes_[node.inputs[0]].grad;
      for (std::size_t i = 0; i < node.value.rows(); ++i) {
        softmax_backward(node.value.row(i), node.grad.row(i), gx.row(i));
      }
    });
  }

  // -log softmax(logits)[gold] with the fused (p - onehot) backward rule.
  Var softmax_cross_entropy(Var logits, std::size_t gold, const std::vector<bool>* mask = nullptr) {
    Tensor<T> p = value(logits);
    if (p.rank() != 1) throw ContractViolation("softmax_cross_entropy: expects a vector");
    if (gold >= p.size()) {
      throw ContractViolation("softmax_cross_entropy: gold index " + std::to_string(gold) + " outside " +
                              std::to_string(p.size()) + " positions");
    }
    if (mask && !(*mask)[gold]) {
      throw ContractViolation("softmax_cross_entropy: gold index " + std::to_string(gold) + " is a masked position");
    }
    softmax_inplace(p.values(), mask);
    T loss = -std::log(std::max(p[gold], static_cast<T>(kLogFloor)));
    Var out = push(Tensor<T>::scalar(loss), {logits.id}, [gold](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      const auto& probs = g.aux_[node.aux];
      auto& gx = g.nodes_[node.inputs[0]].grad;
      T gy = node.grad[0];
      for (std::size_t k = 0; k < probs.size(); ++k) gx[k] += gy * (probs[k] - (k == gold ? T(1) : T(0)));
    });
    nodes_[out.id].aux = aux_.size();
    aux_.push_back(std::move(p));
    return out;
  }

  // Fused LSTM cell. z holds the pre-activations of the input, forget,
  // candidate and output gates (in that order, 4h values); returns [h ; c].
  Var lstm_cell(Var z, Var c_prev) {
    const auto& Z = value(z);
    const auto& C = value(c_prev);
    const std::size_t h = C.size();
    if (Z.rank() != 1 || C.rank() != 1 || Z.size() != 4 * h) shape_error("lstm_cell", Z.shape(), C.shape());
    Tensor<T> out(Shape{2 * h});
    for (std::size_t k = 0; k < h; ++k) {
      T i = sigmoid_value(Z[k]);
      T f = sigmoid_value(Z[h + k]);
      T gg = std::tanh(Z[2 * h + k]);
      T o = sigmoid_value(Z[3 * h + k]);
      T c = f * C[k] + i * gg;
      out[h + k] = c;
      out[k] = o * std::tanh(c);
    }
    return push(std::move(out), {z.id, c_prev.id}, [h](Graph& g, std::size_t self) {
      const auto& node = g.nodes_[self];
      Node& nz = g.nodes_[node.inputs[0]];
      Node& nc = g.nodes_[node.inputs[1]];
      const auto& Z = nz.value;
      for (std::size_t k = 0; k < h; ++k) {
        T i = sigmoid_value(Z[k]);
        T f = sigmoid_value(Z[h + k]);
        T gg = std::tanh(Z[2 * h + k]);
        T o = sigmoid_value(Z[3 * h + k]);
        T c = node.value[h + k];
        T tc = std::tanh(c);
        T gh = node.grad[k];
        T dc = node.grad[h + k] + gh * o * (T(1) - tc * tc);
        if (nz.needs_grad) {
          nz.grad[k] += dc * gg * i * (T(1) - i);
          nz.grad[h + k] += dc * nc.value[k] * f * (T(1) - f);
          nz.grad[2 * h + k] += dc * i * (T(1) - gg * gg);
          nz.grad[3 * h + k] += gh * tc * o * (T(1) - o);
        }
        if (nc.needs_grad) nc.grad[k] += dc * f;
      }
    });
  }

  // ---- helpers shared with value-level code -----------------------------

  static T sigmoid_value(T x) {
    if (x >= T(0)) {
      T e = std::exp(-x);
      return T(1) / (T(1) + e);
    }
    T e = std::exp(x);
    return e / (T(1) + e);
  }

  static void softmax_inplace(std::span<T> v, const std::vector<bool>* mask) {
    if (v.empty()) throw ContractViolation("softmax: empty input");
    if (mask && mask->size() != v.size()) {
      throw ContractViolation("softmax: mask has " + std::to_string(mask->size()) + " entries for " +
                              std::to_string(v.size()) + " logits");
    }
    auto live = [&](std::size_t k) { return !mask || (*mask)[k]; };
    T mx = -std::numeric_limits<T>::infinity();
    bool any = false;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (live(k)) {
        mx = std::max(mx, v[k]);
        any = true;
      }
    }
    if (!any) throw ContractViolation("softmax: every position is masked");
    T total = T(0);
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = live(k) ? std::exp(v[k] - mx) : T(0);
      total += v[k];
    }
    for (auto& x : v) x /= total;
  }

 private:
  using Backward = std::function<void(Graph&, std::size_t)>;

  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    std::vector<std::size_t> inputs;
    Backward backward;
    bool needs_grad = false;
    std::size_t aux = 0;
  };

  static void softmax_backward(std::span<const T> y, std::span<const T> gy, std::span<T> gx) {
    if (gx.empty()) return;
    T inner = T(0);
    for (std::size_t k = 0; k < y.size(); ++k) inner += gy[k] * y[k];
    for (std::size_t k = 0; k < y.size(); ++k) gx[k] += y[k] * (gy[k] - inner);
  }

  const Node& node(Var v) const {
    if (v.id >= nodes_.size()) throw ContractViolation("graph: invalid variable handle");
    return nodes_[v.id];
  }

  Var push(Tensor<T> value, std::vector<std::size_t> inputs, Backward backward, bool leaf_needs_grad = false) {
    bool needs = leaf_needs_grad;
    for (std::size_t in : inputs) needs = needs || nodes_[in].needs_grad;
    Node n;
    n.value = std::move(value);
    n.inputs = std::move(inputs);
    n.backward = needs ? std::move(backward) : Backward{};
    n.needs_grad = needs;
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
  }

  ParameterStore<T>* store_;
  std::vector<Node> nodes_;
  std::vector<Tensor<T>> aux_;
  std::unordered_map<std::string, Var> param_nodes_;
};

}  // namespace tqr::nn
