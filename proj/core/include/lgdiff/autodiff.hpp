//
// Copyright 2026 the lgdiff authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "lgdiff/rng.hpp"
#include "lgdiff/tensor.hpp"

namespace lgdiff {

// A named learnable weight. Gradients accumulate across backward calls and
// are zeroed between optimizer steps.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void zero_grad() { grad.fill(0.0); }
};

// When true (the default), dropout and drop-path are identity maps so every
// forward value is an exact deterministic function of its inputs.
void set_deterministic_eval(bool on);
bool deterministic_eval();

// When true, every primitive checks its output for non-finite values and
// throws NumericalError on the first NaN/Inf.
void set_debug_check_finite(bool on);
bool debug_check_finite();

class Graph;

// Handle into a recorded computation.
struct Value {
  Graph* graph = nullptr;
  int id = -1;

  const Tensor& val() const;
  int rows() const { return val().rows(); }
  int cols() const { return val().cols(); }
};

// A recorded computation for one forward pass. Nodes are stored in creation
// order, which is a valid topological order for the backward sweep.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Value constant(Tensor v);
  // Leaf bound to a parameter; repeated calls for the same parameter within
  // one graph return the same node.
  Value param(Parameter& p);

  // Runs reverse accumulation from a scalar loss. Each node's backward runs
  // exactly once; parameter gradients are accumulated into Parameter::grad.
  void backward(const Value& loss);

  void clear();
  std::size_t size() const { return nodes_.size(); }

  Value make_node(Tensor value, std::initializer_list<Value> parents, BackwardFn back);
  Value make_node(Tensor value, const std::vector<Value>& parents, BackwardFn back);

  const Tensor& value_of(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  Tensor& grad_of(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }
  bool wants_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].needs_grad; }
  void accum_grad(int id, Tensor contribution);

 private:
  struct Node {
    Tensor value;
    Tensor grad;  // lazily allocated: empty until first contribution
    bool needs_grad = false;
    Parameter* bound = nullptr;
    BackwardFn back;
  };

  Value push(Node n);

  std::vector<Node> nodes_;
  std::unordered_map<Parameter*, int> param_leaves_;
  bool backward_done_ = false;
};

// ---- primitive ops ----
// All operands must live on the same graph and be rank-2 tensors
// (scalars are 1x1, vectors 1xd or dx1).

Value matmul(Value a, Value b);
Value transpose(Value a);
Value reshape(Value a, std::vector<int> shape);

Value add(Value a, Value b);
Value sub(Value a, Value b);
Value mul(Value a, Value b);
Value scale(Value a, double c);
Value add_scalar(Value a, double c);

Value add_rowvec(Value a, Value v);  // v: 1 x cols(a)
Value add_colvec(Value a, Value v);  // v: rows(a) x 1
Value mul_rowvec(Value a, Value v);
Value mul_colvec(Value a, Value v);
Value reciprocal(Value a);

Value concat_cols(const std::vector<Value>& parts);
Value slice_cols(Value a, int start, int len);
Value gather_rows(Value a, std::vector<int> indices);

Value sum_over_axis(Value a, int axis);   // axis 0 -> 1 x cols, axis 1 -> rows x 1
Value mean_over_axis(Value a, int axis);
Value sum_all(Value a);

Value gelu(Value a);  // exact Gaussian-CDF form
Value exp(Value a);
Value log(Value a);

Value layer_norm(Value a, double eps = 1e-6);   // per row, no affine
Value softmax_rows(Value a);
Value masked_softmax_rows(Value a, const Tensor& mask);  // mask in {0,1}, same shape

// Mean cross-entropy of row-wise logits against integer class targets.
Value cross_entropy_mean(Value logits, const std::vector<int>& targets);

// Inverted dropout; identity when p == 0 or deterministic_eval() is set.
Value dropout(Value a, double p, Rng* rng);

}  // namespace lgdiff
