//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "lgdiff/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace lgdiff {

namespace {
bool g_deterministic_eval = true;
bool g_debug_check_finite = false;

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void require_same_graph(const Value& a, const Value& b, const char* who) {
  if (a.graph == nullptr || a.graph != b.graph)
    throw InvalidInputError(std::string(who) + ": operands belong to different graphs");
}

void require_2d(const Tensor& t, const char* who) {
  if (t.ndim() != 2)
    throw ShapeError(std::string(who) + ": expected rank-2 tensor, got " + shape_string(t));
}
}  // namespace

void set_deterministic_eval(bool on) { g_deterministic_eval = on; }
bool deterministic_eval() { return g_deterministic_eval; }
void set_debug_check_finite(bool on) { g_debug_check_finite = on; }
bool debug_check_finite() { return g_debug_check_finite; }

const Tensor& Value::val() const { return graph->value_of(id); }

Value Graph::push(Node n) {
  if (g_debug_check_finite && !n.value.all_finite())
    throw NumericalError("graph: non-finite value produced by a primitive op");
  nodes_.push_back(std::move(n));
  return Value{this, static_cast<int>(nodes_.size()) - 1};
}

Value Graph::constant(Tensor v) {
  Node n;
  n.value = std::move(v);
  n.needs_grad = false;
  return push(std::move(n));
}

Value Graph::param(Parameter& p) {
  auto it = param_leaves_.find(&p);
  if (it != param_leaves_.end()) return Value{this, it->second};
  Node n;
  n.value = p.value;
  n.needs_grad = true;
  n.bound = &p;
  Value v = push(std::move(n));
  param_leaves_.emplace(&p, v.id);
  return v;
}

Value Graph::make_node(Tensor value, std::initializer_list<Value> parents, BackwardFn back) {
  return make_node(std::move(value), std::vector<Value>(parents), std::move(back));
}

Value Graph::make_node(Tensor value, const std::vector<Value>& parents, BackwardFn back) {
  Node n;
  n.value = std::move(value);
  for (const Value& p : parents) {
    if (p.graph != this) throw InvalidInputError("graph: parent from another graph");
    if (nodes_[static_cast<std::size_t>(p.id)].needs_grad) n.needs_grad = true;
  }
  if (n.needs_grad) n.back = std::move(back);
  return push(std::move(n));
}

void Graph::accum_grad(int id, Tensor contribution) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.needs_grad) return;
  if (!contribution.same_shape(n.value))
    throw ShapeError("graph: gradient shape mismatch at node " + std::to_string(id));
  if (n.grad.empty())
    n.grad = std::move(contribution);
  else
    add_inplace(n.grad, contribution);
}

void Graph::backward(const Value& loss) {
  if (loss.graph != this) throw InvalidInputError("backward: loss from another graph");
  if (backward_done_) throw InvalidInputError("backward: graph already back-propagated");
  backward_done_ = true;
  const Tensor& lv = value_of(loss.id);
  if (lv.numel() != 1) throw InvalidInputError("backward: loss must be a scalar");

  Node& ln = nodes_[static_cast<std::size_t>(loss.id)];
  ln.grad = Tensor::full(lv.shape(), 1.0);

  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.empty() || !n.back) continue;
    n.back(*this, id);
  }
  for (const auto& [p, id] : param_leaves_) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.grad.empty()) add_inplace(p->grad, n.grad);
  }
}

void Graph::clear() {
  nodes_.clear();
  param_leaves_.clear();
  backward_done_ = false;
}

// ---- ops ----

Value matmul(Value a, Value b) {
  require_same_graph(a, b, "matmul");
  Graph& g = *a.graph;
  Tensor c = matmul(a.val(), b.val());
  const int aid = a.id, bid = b.id;
  return g.make_node(std::move(c), {a, b}, [aid, bid](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    if (g.wants_grad(aid)) g.accum_grad(aid, matmul_nt(gy, g.value_of(bid)));
    if (g.wants_grad(bid)) g.accum_grad(bid, matmul_tn(g.value_of(aid), gy));
  });
}

Value transpose(Value a) {
  Graph& g = *a.graph;
  const int aid = a.id;
  return g.make_node(transpose(a.val()), {a}, [aid](Graph& g, int self) {
    g.accum_grad(aid, transpose(g.grad_of(self)));
  });
}

Value reshape(Value a, std::vector<int> shape) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  if (Tensor::count(shape) != av.numel())
    throw ShapeError("reshape: element count mismatch for " + shape_string(av));
  Tensor out(shape);
  std::copy(av.data(), av.data() + av.numel(), out.data());
  const int aid = a.id;
  std::vector<int> orig = av.shape();
  return g.make_node(std::move(out), {a}, [aid, orig](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    Tensor ga(orig);
    std::copy(gy.data(), gy.data() + gy.numel(), ga.data());
    g.accum_grad(aid, std::move(ga));
  });
}

Value add(Value a, Value b) {
  require_same_graph(a, b, "add");
  Graph& g = *a.graph;
  if (!a.val().same_shape(b.val()))
    throw ShapeError("add: shape mismatch, " + shape_string(a.val()) + " vs " + shape_string(b.val()));
  Tensor c = a.val();
  add_inplace(c, b.val());
  const int aid = a.id, bid = b.id;
  return g.make_node(std::move(c), {a, b}, [aid, bid](Graph& g, int self) {
    if (g.wants_grad(aid)) g.accum_grad(aid, g.grad_of(self));
    if (g.wants_grad(bid)) g.accum_grad(bid, g.grad_of(self));
  });
}

Value sub(Value a, Value b) { return add(a, scale(b, -1.0)); }

Value mul(Value a, Value b) {
  require_same_graph(a, b, "mul");
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  const Tensor& bv = b.val();
  if (!av.same_shape(bv))
    throw ShapeError("mul: shape mismatch, " + shape_string(av) + " vs " + shape_string(bv));
  Tensor c(av.shape());
  for (std::int64_t i = 0; i < av.numel(); ++i) c[i] = av[i] * bv[i];
  const int aid = a.id, bid = b.id;
  return g.make_node(std::move(c), {a, b}, [aid, bid](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    if (g.wants_grad(aid)) {
      const Tensor& bv = g.value_of(bid);
      Tensor ga(gy.shape());
      for (std::int64_t i = 0; i < gy.numel(); ++i) ga[i] = gy[i] * bv[i];
      g.accum_grad(aid, std::move(ga));
    }
    if (g.wants_grad(bid)) {
      const Tensor& av = g.value_of(aid);
      Tensor gb(gy.shape());
      for (std::int64_t i = 0; i < gy.numel(); ++i) gb[i] = gy[i] * av[i];
      g.accum_grad(bid, std::move(gb));
    }
  });
}

Value scale(Value a, double c) {
  Graph& g = *a.graph;
  Tensor out = a.val();
  scale_inplace(out, c);
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid, c](Graph& g, int self) {
    Tensor ga = g.grad_of(self);
    scale_inplace(ga, c);
    g.accum_grad(aid, std::move(ga));
  });
}

Value add_scalar(Value a, double c) {
  Graph& g = *a.graph;
  Tensor out = a.val();
  for (std::int64_t i = 0; i < out.numel(); ++i) out[i] += c;
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid](Graph& g, int self) {
    g.accum_grad(aid, g.grad_of(self));
  });
}

namespace {
enum class Bcast { row, col };

Value broadcast_op(Value a, Value v, Bcast dir, bool multiply, const char* who) {
  require_same_graph(a, v, who);
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  const Tensor& vv = v.val();
  require_2d(av, who);
  const bool row = dir == Bcast::row;
  const int expect_r = row ? 1 : av.rows();
  const int expect_c = row ? av.cols() : 1;
  if (vv.ndim() != 2 || vv.rows() != expect_r || vv.cols() != expect_c)
    throw ShapeError(std::string(who) + ": broadcast operand must be " + std::to_string(expect_r) + "x" +
                     std::to_string(expect_c) + ", got " + shape_string(vv));
  const int R = av.rows(), C = av.cols();
  Tensor out({R, C});
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) {
      const double b = row ? vv[j] : vv[i];
      out(i, j) = multiply ? av(i, j) * b : av(i, j) + b;
    }
  const int aid = a.id, vid = v.id;
  return g.make_node(std::move(out), {a, v}, [aid, vid, row, multiply, R, C](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    const Tensor& av = g.value_of(aid);
    const Tensor& vv = g.value_of(vid);
    if (g.wants_grad(aid)) {
      Tensor ga({R, C});
      for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
          const double b = row ? vv[j] : vv[i];
          ga(i, j) = multiply ? gy(i, j) * b : gy(i, j);
        }
      g.accum_grad(aid, std::move(ga));
    }
    if (g.wants_grad(vid)) {
      Tensor gv(vv.shape());
      for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
          const double contrib = multiply ? gy(i, j) * av(i, j) : gy(i, j);
          gv[row ? j : i] += contrib;
        }
      g.accum_grad(vid, std::move(gv));
    }
  });
}
}  // namespace

Value add_rowvec(Value a, Value v) { return broadcast_op(a, v, Bcast::row, false, "add_rowvec"); }
Value add_colvec(Value a, Value v) { return broadcast_op(a, v, Bcast::col, false, "add_colvec"); }
Value mul_rowvec(Value a, Value v) { return broadcast_op(a, v, Bcast::row, true, "mul_rowvec"); }
Value mul_colvec(Value a, Value v) { return broadcast_op(a, v, Bcast::col, true, "mul_colvec"); }

Value reciprocal(Value a) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  Tensor out(av.shape());
  for (std::int64_t i = 0; i < av.numel(); ++i) out[i] = 1.0 / av[i];
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    const Tensor& y = g.value_of(self);
    Tensor ga(gy.shape());
    for (std::int64_t i = 0; i < gy.numel(); ++i) ga[i] = -gy[i] * y[i] * y[i];
    g.accum_grad(aid, std::move(ga));
  });
}

Value concat_cols(const std::vector<Value>& parts) {
  if (parts.empty()) throw InvalidInputError("concat_cols: no operands");
  Graph& g = *parts[0].graph;
  const int R = parts[0].val().rows();
  int total = 0;
  for (const Value& p : parts) {
    require_same_graph(parts[0], p, "concat_cols");
    require_2d(p.val(), "concat_cols");
    if (p.val().rows() != R) throw ShapeError("concat_cols: row count mismatch");
    total += p.val().cols();
  }
  Tensor out({R, total});
  int off = 0;
  for (const Value& p : parts) {
    const Tensor& pv = p.val();
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < pv.cols(); ++j) out(i, off + j) = pv(i, j);
    off += pv.cols();
  }
  std::vector<int> ids;
  std::vector<int> widths;
  for (const Value& p : parts) {
    ids.push_back(p.id);
    widths.push_back(p.val().cols());
  }
  return g.make_node(std::move(out), parts, [ids, widths, R](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    int off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (g.wants_grad(ids[k])) {
        Tensor gp({R, widths[k]});
        for (int i = 0; i < R; ++i)
          for (int j = 0; j < widths[k]; ++j) gp(i, j) = gy(i, off + j);
        g.accum_grad(ids[k], std::move(gp));
      }
      off += widths[k];
    }
  });
}

Value slice_cols(Value a, int start, int len) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  require_2d(av, "slice_cols");
  if (start < 0 || len <= 0 || start + len > av.cols())
    throw ShapeError("slice_cols: range out of bounds");
  const int R = av.rows();
  Tensor out({R, len});
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < len; ++j) out(i, j) = av(i, start + j);
  const int aid = a.id, C = av.cols();
  return g.make_node(std::move(out), {a}, [aid, start, len, R, C](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    Tensor ga({R, C});
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < len; ++j) ga(i, start + j) = gy(i, j);
    g.accum_grad(aid, std::move(ga));
  });
}

Value gather_rows(Value a, std::vector<int> indices) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  require_2d(av, "gather_rows");
  for (int idx : indices)
    if (idx < 0 || idx >= av.rows()) throw ShapeError("gather_rows: index out of range");
  const int C = av.cols();
  Tensor out({static_cast<int>(indices.size()), C});
  for (std::size_t r = 0; r < indices.size(); ++r)
    for (int j = 0; j < C; ++j) out(static_cast<int>(r), j) = av(indices[r], j);
  const int aid = a.id, R = av.rows();
  return g.make_node(std::move(out), {a}, [aid, indices, R, C](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    Tensor ga({R, C});
    for (std::size_t r = 0; r < indices.size(); ++r)
      for (int j = 0; j < C; ++j) ga(indices[r], j) += gy(static_cast<int>(r), j);
    g.accum_grad(aid, std::move(ga));
  });
}

Value sum_over_axis(Value a, int axis) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  require_2d(av, "sum_over_axis");
  if (axis != 0 && axis != 1) throw InvalidInputError("sum_over_axis: axis must be 0 or 1");
  const int R = av.rows(), C = av.cols();
  Tensor out(axis == 0 ? std::vector<int>{1, C} : std::vector<int>{R, 1});
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) out[axis == 0 ? j : i] += av(i, j);
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid, axis, R, C](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    Tensor ga({R, C});
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < C; ++j) ga(i, j) = gy[axis == 0 ? j : i];
    g.accum_grad(aid, std::move(ga));
  });
}

Value mean_over_axis(Value a, int axis) {
  const Tensor& av = a.val();
  require_2d(av, "mean_over_axis");
  const int n = axis == 0 ? av.rows() : av.cols();
  return scale(sum_over_axis(a, axis), 1.0 / static_cast<double>(n));
}

Value sum_all(Value a) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  double s = 0.0;
  for (std::int64_t i = 0; i < av.numel(); ++i) s += av[i];
  const int aid = a.id;
  std::vector<int> shape = av.shape();
  return g.make_node(Tensor::scalar(s), {a}, [aid, shape](Graph& g, int self) {
    const double gy = g.grad_of(self)[0];
    g.accum_grad(aid, Tensor::full(shape, gy));
  });
}

Value gelu(Value a) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  Tensor out(av.shape());
  for (std::int64_t i = 0; i < av.numel(); ++i) {
    const double x = av[i];
    out[i] = 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
  }
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    const Tensor& av = g.value_of(aid);
    Tensor ga(gy.shape());
    for (std::int64_t i = 0; i < gy.numel(); ++i) {
      const double x = av[i];
      const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      ga[i] = gy[i] * (cdf + x * pdf);
    }
    g.accum_grad(aid, std::move(ga));
  });
}

Value exp(Value a) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  Tensor out(av.shape());
  for (std::int64_t i = 0; i < av.numel(); ++i) out[i] = std::exp(av[i]);
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    const Tensor& y = g.value_of(self);
    Tensor ga(gy.shape());
    for (std::int64_t i = 0; i < gy.numel(); ++i) ga[i] = gy[i] * y[i];
    g.accum_grad(aid, std::move(ga));
  });
}

Value log(Value a) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  Tensor out(av.shape());
  for (std::int64_t i = 0; i < av.numel(); ++i) out[i] = std::log(av[i]);
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    const Tensor& av = g.value_of(aid);
    Tensor ga(gy.shape());
    for (std::int64_t i = 0; i < gy.numel(); ++i) ga[i] = gy[i] / av[i];
    g.accum_grad(aid, std::move(ga));
  });
}

Value layer_norm(Value a, double eps) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  require_2d(av, "layer_norm");
  const int R = av.rows(), C = av.cols();
  Tensor out({R, C});
  Tensor inv_std({R, 1});
  for (int i = 0; i < R; ++i) {
    double mean = 0.0;
    for (int j = 0; j < C; ++j) mean += av(i, j);
    mean /= C;
    double var = 0.0;
    for (int j = 0; j < C; ++j) {
      const double d = av(i, j) - mean;
      var += d * d;
    }
    var /= C;
    const double istd = 1.0 / std::sqrt(var + eps);
    inv_std(i, 0) = istd;
    for (int j = 0; j < C; ++j) out(i, j) = (av(i, j) - mean) * istd;
  }
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid, inv_std, R, C](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    const Tensor& y = g.value_of(self);
    Tensor ga({R, C});
    for (int i = 0; i < R; ++i) {
      double mean_gy = 0.0, mean_gyy = 0.0;
      for (int j = 0; j < C; ++j) {
        mean_gy += gy(i, j);
        mean_gyy += gy(i, j) * y(i, j);
      }
      mean_gy /= C;
      mean_gyy /= C;
      const double istd = inv_std(i, 0);
      for (int j = 0; j < C; ++j)
        ga(i, j) = istd * (gy(i, j) - mean_gy - y(i, j) * mean_gyy);
    }
    g.accum_grad(aid, std::move(ga));
  });
}

namespace {
Value softmax_impl(Value a, const Tensor* mask, const char* who) {
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  require_2d(av, who);
  if (mask && !mask->same_shape(av))
    throw ShapeError(std::string(who) + ": mask shape mismatch");
  const int R = av.rows(), C = av.cols();
  Tensor out({R, C});
  for (int i = 0; i < R; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    int live = 0;
    for (int j = 0; j < C; ++j) {
      if (mask && (*mask)(i, j) == 0.0) continue;
      m = std::max(m, av(i, j));
      ++live;
    }
    if (mask && live == 0)
      throw InvalidInputError(std::string(who) + ": degenerate mask, row " + std::to_string(i) +
                              " has no unmasked entries");
    double s = 0.0;
    for (int j = 0; j < C; ++j) {
      if (mask && (*mask)(i, j) == 0.0) {
        out(i, j) = 0.0;
        continue;
      }
      out(i, j) = std::exp(av(i, j) - m);
      s += out(i, j);
    }
    for (int j = 0; j < C; ++j) out(i, j) /= s;
  }
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid, R, C](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    const Tensor& p = g.value_of(self);
    Tensor ga({R, C});
    for (int i = 0; i < R; ++i) {
      double dot = 0.0;
      for (int j = 0; j < C; ++j) dot += gy(i, j) * p(i, j);
      for (int j = 0; j < C; ++j) ga(i, j) = p(i, j) * (gy(i, j) - dot);
    }
    g.accum_grad(aid, std::move(ga));
  });
}
}  // namespace

Value softmax_rows(Value a) { return softmax_impl(a, nullptr, "softmax_rows"); }

Value masked_softmax_rows(Value a, const Tensor& mask) {
  return softmax_impl(a, &mask, "masked_softmax_rows");
}

Value cross_entropy_mean(Value logits, const std::vector<int>& targets) {
  Graph& g = *logits.graph;
  const Tensor& lv = logits.val();
  require_2d(lv, "cross_entropy_mean");
  const int R = lv.rows(), C = lv.cols();
  if (static_cast<int>(targets.size()) != R)
    throw ShapeError("cross_entropy_mean: one target per logits row required");
  for (int t : targets)
    if (t < 0 || t >= C) throw InvalidInputError("cross_entropy_mean: target class out of range");
  double loss = 0.0;
  for (int i = 0; i < R; ++i) {
    const double lse = log_sum_exp(lv.data() + static_cast<std::size_t>(i) * C, C);
    loss += lse - lv(i, targets[static_cast<std::size_t>(i)]);
  }
  loss /= R;
  const int lid = logits.id;
  return g.make_node(Tensor::scalar(loss), {logits}, [lid, targets, R, C](Graph& g, int self) {
    const double gy = g.grad_of(self)[0];
    const Tensor& lv = g.value_of(lid);
    Tensor ga({R, C});
    for (int i = 0; i < R; ++i) {
      const double* row = lv.data() + static_cast<std::size_t>(i) * C;
      double m = row[0];
      for (int j = 1; j < C; ++j) m = std::max(m, row[j]);
      double s = 0.0;
      for (int j = 0; j < C; ++j) s += std::exp(row[j] - m);
      for (int j = 0; j < C; ++j) {
        double p = std::exp(row[j] - m) / s;
        if (j == targets[static_cast<std::size_t>(i)]) p -= 1.0;
        ga(i, j) = gy * p / R;
      }
    }
    g.accum_grad(lid, std::move(ga));
  });
}

Value dropout(Value a, double p, Rng* rng) {
  if (p <= 0.0 || deterministic_eval()) return a;
  if (p >= 1.0) throw InvalidInputError("dropout: rate must be < 1");
  if (rng == nullptr) throw InvalidInputError("dropout: rng required in stochastic mode");
  Graph& g = *a.graph;
  const Tensor& av = a.val();
  Tensor mask(av.shape());
  const double keep = 1.0 - p;
  for (std::int64_t i = 0; i < av.numel(); ++i)
    mask[i] = rng->uniform() < keep ? 1.0 / keep : 0.0;
  Tensor out(av.shape());
  for (std::int64_t i = 0; i < av.numel(); ++i) out[i] = av[i] * mask[i];
  const int aid = a.id;
  return g.make_node(std::move(out), {a}, [aid, mask](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    Tensor ga(gy.shape());
    for (std::int64_t i = 0; i < gy.numel(); ++i) ga[i] = gy[i] * mask[i];
    g.accum_grad(aid, std::move(ga));
  });
}

}  // namespace lgdiff
