#include "ccnrank/autodiff.hpp"

#include <cstring>

#include "ccnrank/errors.hpp"

namespace ccnrank {

// ---------------------------------------------------------------------------
// ParameterSet

ParameterSet::ParameterSet(const ParameterSet& other)
    : entries_(other.entries_), names_(other.names_), index_(other.index_) {}

ParameterSet& ParameterSet::operator=(const ParameterSet& other) {
  if (this != &other) {
    entries_ = other.entries_;
    names_ = other.names_;
    index_ = other.index_;
  }
  return *this;
}

Tensor& ParameterSet::add(std::string name, Tensor init, bool trainable) {
  if (index_.count(name)) {
    throw ContractError("duplicate parameter name '" + name + "'");
  }
  Tensor grad = Tensor::zeros_like(init);
  entries_.push_back(Entry{std::move(init), std::move(grad), trainable});
  index_.emplace(name, entries_.size() - 1);
  names_.push_back(std::move(name));
  return entries_.back().value;
}

bool ParameterSet::contains(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

ParameterSet::Entry& ParameterSet::entry(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw ContractError("unknown parameter '" + std::string(name) + "'");
  }
  return entries_[it->second];
}

const ParameterSet::Entry& ParameterSet::entry(std::string_view name) const {
  return const_cast<ParameterSet*>(this)->entry(name);
}

Tensor& ParameterSet::value(std::string_view name) { return entry(name).value; }
const Tensor& ParameterSet::value(std::string_view name) const {
  return entry(name).value;
}
Tensor& ParameterSet::grad(std::string_view name) { return entry(name).grad; }
const Tensor& ParameterSet::grad(std::string_view name) const {
  return entry(name).grad;
}
bool ParameterSet::trainable(std::string_view name) const {
  return entry(name).trainable;
}
void ParameterSet::set_trainable(std::string_view name, bool trainable) {
  entry(name).trainable = trainable;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& e : entries_) e.grad.fill(0.0);
}

void ParameterSet::assign_values(const ParameterSet& other) {
  if (other.names_ != names_) {
    throw ContractError("parameter manifests differ; cannot assign values");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].value.shape() != other.entries_[i].value.shape()) {
      throw ShapeError("parameter '" + names_[i] + "' shape " +
                       entries_[i].value.shape_string() + " vs " +
                       other.entries_[i].value.shape_string());
    }
    entries_[i].value = other.entries_[i].value;
  }
}

bool ParameterSet::values_equal(const ParameterSet& other) const {
  if (other.names_ != names_) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Tensor& a = entries_[i].value;
    const Tensor& b = other.entries_[i].value;
    if (a.shape() != b.shape()) return false;
    if (std::memcmp(a.data().data(), b.data().data(),
                    a.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Graph

Graph::Node& Graph::node(Var v) {
  if (v.id >= nodes_.size()) {
    throw ContractError("variable " + std::to_string(v.id) +
                        " does not belong to this graph");
  }
  return nodes_[v.id];
}

const Graph::Node& Graph::node(Var v) const {
  return const_cast<Graph*>(this)->node(v);
}

Var Graph::constant(Tensor value) {
  Node n;
  n.owned_value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Graph::param(ParameterSet& params, const std::string& name) {
  auto key = std::make_pair(static_cast<const ParameterSet*>(&params), name);
  if (auto it = param_leaves_.find(key); it != param_leaves_.end()) {
    return Var{it->second};
  }
  Node n;
  n.external_value = &params.value(name);
  n.param_grad = &params.grad(name);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  param_leaves_.emplace(std::move(key), nodes_.size() - 1);
  return Var{nodes_.size() - 1};
}

Var Graph::param(const ParameterSet& params, const std::string& name) {
  auto key = std::make_pair(&params, name);
  if (auto it = param_leaves_.find(key); it != param_leaves_.end()) {
    return Var{it->second};
  }
  Node n;
  n.external_value = &params.value(name);
  nodes_.push_back(std::move(n));
  param_leaves_.emplace(std::move(key), nodes_.size() - 1);
  return Var{nodes_.size() - 1};
}

Var Graph::record(Tensor value, std::vector<Var> inputs, BackwardFn backward) {
  Node n;
  n.owned_value = std::move(value);
  n.inputs.reserve(inputs.size());
  for (Var in : inputs) {
    const Node& src = node(in);
    n.requires_grad = n.requires_grad || src.requires_grad;
    n.inputs.push_back(in.id);
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

const Tensor& Graph::value(Var v) const {
  const Node& n = node(v);
  return n.external_value ? *n.external_value : n.owned_value;
}

Tensor Graph::grad(Var v) const {
  const Node& n = node(v);
  if (n.param_grad) return *n.param_grad;
  if (n.has_grad) return n.grad;
  return Tensor::zeros_like(value(v));
}

bool Graph::requires_grad(Var v) const { return node(v).requires_grad; }

Tensor* Graph::grad_slot(Node& n) {
  if (n.param_grad) return n.param_grad;
  if (!n.has_grad) {
    const Tensor& v = n.external_value ? *n.external_value : n.owned_value;
    n.grad = Tensor::zeros_like(v);
    n.has_grad = true;
  }
  return &n.grad;
}

void Graph::backward(Var output) {
  Node& out = node(output);
  const Tensor& out_value = value(output);
  if (out_value.size() != 1) {
    throw ContractError("backward() needs a scalar output, got shape " +
                        out_value.shape_string());
  }
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  if (!out.requires_grad) return;
  (*grad_slot(out))[0] += 1.0;

  std::vector<Tensor*> in_grads;
  for (std::size_t i = output.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || !n.has_grad) continue;
    in_grads.clear();
    for (std::size_t in : n.inputs) {
      Node& src = nodes_[in];
      in_grads.push_back(src.requires_grad ? grad_slot(src) : nullptr);
    }
    n.backward(n.grad, in_grads);
  }
}

}  // namespace ccnrank
