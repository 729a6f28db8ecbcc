#include "sidnism/tape.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sidnism::ad {

std::size_t numel(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {

void check_shape(const Shape& shape, std::size_t length) {
  if (shape.empty() || shape.size() > 4) {
    throw std::invalid_argument("tensor rank must be 1..4, got shape " + to_string(shape));
  }
  if (numel(shape) != length) {
    throw std::invalid_argument("tensor data length " + std::to_string(length) +
                                " does not match shape " + to_string(shape));
  }
}

}  // namespace

Parameter::Parameter(Shape s, std::vector<double> v) : shape(std::move(s)), value(std::move(v)) {
  check_shape(shape, value.size());
  grad.assign(value.size(), 0.0);
}

Parameter::Parameter(Shape s, double fill) : shape(std::move(s)) {
  value.assign(numel(shape), fill);
  check_shape(shape, value.size());
  grad.assign(value.size(), 0.0);
}

void Parameter::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

const Shape& Tensor::shape() const { return tape_->shape_of(id_); }
std::size_t Tensor::numel() const { return tape_->value_of(id_).size(); }
std::span<const double> Tensor::values() const { return tape_->value_of(id_); }
std::span<const double> Tensor::grad() const { return tape_->grad_of(id_); }
bool Tensor::requires_grad() const { return tape_->requires_grad(id_); }

double Tensor::item() const {
  const auto v = values();
  if (v.size() != 1) throw std::logic_error("item() on a tensor with " + std::to_string(v.size()) + " elements");
  return v[0];
}

Tensor Tape::constant(Shape shape, std::vector<double> value) {
  check_shape(shape, value.size());
  Node node;
  node.shape = std::move(shape);
  node.value = std::move(value);
  node.leaf = true;
  nodes_.push_back(std::move(node));
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::constant(double value) { return constant(Shape{1}, std::vector<double>{value}); }

Tensor Tape::variable(Shape shape, std::vector<double> value) {
  Tensor t = constant(std::move(shape), std::move(value));
  nodes_.back().requires_grad = true;
  return t;
}

Tensor Tape::parameter(Parameter& param) {
  Tensor t = variable(param.shape, param.value);
  nodes_.back().param = &param;
  return t;
}

Tensor Tape::record(Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
                    BackwardFn backward) {
  check_shape(shape, value.size());
  Node node;
  node.shape = std::move(shape);
  node.value = std::move(value);
  for (const Tensor& in : inputs) {
    if (in.tape_ != this) throw std::invalid_argument("tensor belongs to a different tape");
    node.inputs.push_back(in.id_);
    node.requires_grad = node.requires_grad || nodes_[in.id_].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Tensor(this, nodes_.size() - 1);
}

std::span<double> Tape::input_grad(std::size_t id) {
  Node& node = nodes_.at(id);
  if (!node.requires_grad) return {};
  if (node.grad.empty()) node.grad.assign(node.value.size(), 0.0);
  return node.grad;
}

void Tape::backward(const Tensor& loss) {
  if (loss.tape_ != this) throw std::invalid_argument("loss belongs to a different tape");
  Node& root = nodes_.at(loss.id_);
  if (root.value.size() != 1) {
    throw std::invalid_argument("backward() needs a scalar loss, got shape " + to_string(root.shape));
  }
  last_visits_ = 0;
  if (!root.requires_grad) return;

  // Intermediate gradients are per-sweep; leaf gradients accumulate.
  for (std::size_t id = 0; id <= loss.id_; ++id) {
    if (!nodes_[id].leaf) nodes_[id].grad.clear();
  }
  // Parameter leaves deliver only this sweep's contribution to param.grad.
  std::vector<std::pair<std::size_t, std::vector<double>>> param_leaves;
  for (std::size_t id = 0; id <= loss.id_; ++id) {
    Node& n = nodes_[id];
    if (n.param != nullptr) {
      param_leaves.emplace_back(id, n.grad);
      n.grad.clear();
    }
  }

  input_grad(loss.id_)[0] += 1.0;
  for (std::size_t id = loss.id_ + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    // Rules write into input gradients only; nodes_ never grows here.
    n.backward(*this, id);
    ++last_visits_;
  }

  for (auto& [id, previous] : param_leaves) {
    Node& n = nodes_[id];
    if (!n.grad.empty()) {
      for (std::size_t i = 0; i < n.grad.size(); ++i) n.param->grad[i] += n.grad[i];
      if (!previous.empty()) {
        for (std::size_t i = 0; i < n.grad.size(); ++i) n.grad[i] += previous[i];
      }
    } else {
      n.grad = std::move(previous);
    }
  }
}

}  // namespace sidnism::ad
