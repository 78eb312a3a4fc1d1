#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ccnrank/parameters.hpp"
#include "ccnrank/tensor.hpp"

namespace ccnrank {

/// Handle to a value recorded on a Graph.
struct Var {
  std::size_t id = 0;
};

/// Receives the gradient flowing into a node's output and adds the
/// corresponding contributions into the input gradient slots. Slots of inputs
/// that do not need gradients are null.
using BackwardFn =
    std::function<void(const Tensor& out_grad, std::span<Tensor* const> in_grads)>;

/// Reverse-mode tape. Nodes are appended in evaluation order, so replaying
/// them in reverse is a valid topological order for backward().
///
/// A Graph belongs to one thread. Parameter leaves alias the ParameterSet's
/// value and gradient storage; backward() accumulates into those slots.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // Repeated requests for the same parameter return the same leaf.
  Var param(ParameterSet& params, const std::string& name);
  // Read-only leaf: aliases the value, receives no gradient.
  Var param(const ParameterSet& params, const std::string& name);
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn backward);

  const Tensor& value(Var v) const;
  // Gradient of the last backward() target w.r.t. v; zeros if unreached.
  Tensor grad(Var v) const;
  bool requires_grad(Var v) const;
  std::size_t size() const noexcept { return nodes_.size(); }

  // Seeds d(output)=1 and propagates. Parameter gradients accumulate (+=),
  // intermediate gradients are recomputed from scratch on each call.
  void backward(Var output);

 private:
  struct Node {
    Tensor owned_value;
    const Tensor* external_value = nullptr;  // parameter leaves alias storage
    Tensor grad;
    bool has_grad = false;
    Tensor* param_grad = nullptr;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
  };

  Node& node(Var v);
  const Node& node(Var v) const;
  Tensor* grad_slot(Node& n);

  std::deque<Node> nodes_;
  std::map<std::pair<const ParameterSet*, std::string>, std::size_t> param_leaves_;
};

}  // namespace ccnrank
