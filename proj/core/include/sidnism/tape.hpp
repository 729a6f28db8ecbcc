#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sidnism::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape) noexcept;
std::string to_string(const Shape& shape);

/// Persistent trainable buffer. Lives outside any tape; each forward pass
/// binds it with Tape::parameter() and backward() accumulates into `grad`.
struct Parameter {
  Parameter() = default;
  Parameter(Shape shape, std::vector<double> value);
  explicit Parameter(Shape shape, double fill = 0.0);

  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;

  void zero_grad();
};

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the
/// tape is alive.
class Tensor {
 public:
  Tensor() = default;

  bool defined() const noexcept { return tape_ != nullptr; }
  Tape& tape() const noexcept { return *tape_; }
  std::size_t id() const noexcept { return id_; }

  const Shape& shape() const;
  std::size_t numel() const;
  std::span<const double> values() const;
  /// Accumulated gradient; empty when nothing has flowed into this node.
  std::span<const double> grad() const;
  bool requires_grad() const;
  /// Value of a single-element tensor.
  double item() const;

 private:
  friend class Tape;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Ordered record of one forward pass. Nodes are appended in execution order,
/// so the vector order is a topological order.
class Tape {
 public:
  /// Propagates the node's gradient into its inputs (see input_grad()).
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor constant(Shape shape, std::vector<double> value);
  Tensor constant(double value);
  /// Leaf that accumulates its own gradient across backward() calls.
  Tensor variable(Shape shape, std::vector<double> value);
  /// Leaf bound to an external Parameter; gradient is added to param.grad.
  Tensor parameter(Parameter& param);

  /// Appends an op result. When no input requires a gradient the backward
  /// rule is dropped and the result is a constant.
  Tensor record(Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
                BackwardFn backward);

  void backward(const Tensor& loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  /// Nodes whose backward rule ran during the last backward().
  std::size_t last_backward_visits() const noexcept { return last_visits_; }

  const Shape& shape_of(std::size_t id) const { return nodes_.at(id).shape; }
  std::span<const double> value_of(std::size_t id) const { return nodes_.at(id).value; }
  std::span<const double> grad_of(std::size_t id) const { return nodes_.at(id).grad; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  std::span<const std::size_t> inputs_of(std::size_t id) const { return nodes_.at(id).inputs; }

  /// Writable gradient buffer of `id`, zero-initialized on first use. Empty
  /// span when the node does not require a gradient.
  std::span<double> input_grad(std::size_t id);

 private:
  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
    bool leaf = false;
  };

  std::vector<Node> nodes_;
  std::size_t last_visits_ = 0;
};

}  // namespace sidnism::ad
