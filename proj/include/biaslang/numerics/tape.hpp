#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "biaslang/error.hpp"
#include "biaslang/numerics/tensor.hpp"

namespace biaslang::ad {

class Tape;

// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
};

// Records a forward computation so gradients can be pulled back through it.
// Nodes are appended in execution order, which is a topological order by
// construction; backward walks them once in reverse.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor t) {
    nodes_.push_back(Node{std::move(t), nullptr, {}, false, "constant", {}});
    return {this, nodes_.size() - 1};
  }

  // Leaf bound to external storage, not copied. Frozen tensors still take
  // part in the forward pass but never get a gradient. Binding the same
  // tensor twice returns the same node, so shared weights accumulate
  // gradient from every use.
  Var parameter(const Tensor& t, bool trainable = true) {
    if (auto it = param_nodes_.find(&t); it != param_nodes_.end()) return {this, it->second};
    nodes_.push_back(Node{{}, &t, {}, trainable, "parameter", {}});
    param_nodes_.emplace(&t, nodes_.size() - 1);
    return {this, nodes_.size() - 1};
  }

  // Appends the result of an operation. The value must already be finite.
  Var record(const char* op, Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
    return record(op, std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(backward));
  }

  Var record(const char* op, Tensor value, std::span<const Var> inputs, BackwardFn backward) {
    bool needs_grad = false;
    for (const auto& in : inputs) {
      if (in.tape != this) throw StateError(std::string(op) + ": input belongs to another tape");
      needs_grad = needs_grad || nodes_[in.id].needs_grad;
    }
    if (!value.all_finite()) throw NumericFault(std::string("non-finite value produced by ") + op);
    nodes_.push_back(Node{std::move(value), nullptr, {}, needs_grad, op, needs_grad ? std::move(backward) : nullptr});
    return {this, nodes_.size() - 1};
  }

  const Tensor& value(std::size_t id) const {
    const Node& n = nodes_.at(id);
    return n.ref ? *n.ref : n.value;
  }

  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }

  // Gradient buffer of a node, zero-initialised on first touch.
  Tensor& grad_buffer(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0 && value(id).size() != 0) n.grad = Tensor(value(id).shape());
    return n.grad;
  }

  const Tensor& grad(std::size_t id) const { return nodes_[id].grad; }

  void backward(Var loss) {
    if (loss.tape != this || loss.id >= nodes_.size()) throw StateError("backward: loss is not on this tape");
    if (backward_done_) throw StateError("backward: already run on this tape");
    if (value(loss.id).size() != 1) throw ShapeError("backward: loss must be a scalar, got " +
                                                     shape_string(value(loss.id).shape()));
    backward_done_ = true;
    if (!nodes_[loss.id].needs_grad) return;
    grad_buffer(loss.id)[0] = 1.0;
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.backward && n.grad.size() != 0) n.backward(*this, i);
    }
  }

  // Gradient of the last backward pass w.r.t. a bound parameter; nullptr
  // when the parameter did not influence the loss.
  const Tensor* gradient(const Tensor& param) const {
    if (!backward_done_) throw StateError("gradient requested before backward");
    auto it = param_nodes_.find(&param);
    if (it == param_nodes_.end()) return nullptr;
    const Node& n = nodes_[it->second];
    return n.grad.size() ? &n.grad : nullptr;
  }

  std::size_t size() const { return nodes_.size(); }
  const char* op_name(std::size_t id) const { return nodes_[id].op; }

 private:
  struct Node {
    Tensor value;
    const Tensor* ref;
    Tensor grad;
    bool needs_grad;
    const char* op;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, std::size_t> param_nodes_;
  bool backward_done_ = false;
};

inline const Tensor& Var::value() const {
  if (!tape) throw StateError("unbound Var");
  return tape->value(id);
}

}  // namespace biaslang::ad
