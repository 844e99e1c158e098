#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ccasgnn/errors.hpp"

namespace ccasgnn::numcore {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class OpKind : std::uint8_t {
  kLeaf,
  kMatMul,
  kAdd,
  kSub,
  kHadamard,
  kScale,
  kRelu,
  kLeakyRelu,
  kElu,
  kRowSoftmax,
  kConcatCols,
  kSliceRows,
  kMeanRows,
  kSum,
  kLog2,
  kTranspose,
  kAddRowBroadcast,
  kOuterAdd,
};

std::string_view op_name(OpKind op);
std::optional<OpKind> op_from_name(std::string_view name);

template <typename Derived>
std::string shape_string(const Eigen::EigenBase<Derived>& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

template <typename Scalar>
class BasicTape;

/// Handle to one recorded value. Only meaningful for the tape that issued it.
template <typename Scalar>
class BasicNodeRef {
 public:
  BasicNodeRef() = default;

  BasicTape<Scalar>& tape() const {
    if (tape_ == nullptr) throw ContractViolation("use of a default-constructed NodeRef");
    return *tape_;
  }
  std::uint32_t index() const { return index_; }
  bool valid() const { return tape_ != nullptr; }

  const MatrixX<Scalar>& value() const { return tape().value(*this); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  Scalar item() const;

  friend bool operator==(const BasicNodeRef&, const BasicNodeRef&) = default;

 private:
  friend class BasicTape<Scalar>;
  BasicNodeRef(BasicTape<Scalar>* tape, std::uint32_t index) : tape_(tape), index_(index) {}

  BasicTape<Scalar>* tape_ = nullptr;
  std::uint32_t index_ = 0;
};

/// Define-by-run record of matrix operations supporting reverse accumulation.
///
/// Nodes are appended in evaluation order, so the record is topologically
/// sorted by construction. A tape is confined to one thread; it is neither
/// copyable nor movable because NodeRefs point back into it.
template <typename Scalar>
class BasicTape {
 public:
  using Matrix = MatrixX<Scalar>;
  using NodeRef = BasicNodeRef<Scalar>;
  /// Receives the upstream gradient of the node it belongs to.
  using BackwardRule = std::function<void(BasicTape&, const Matrix&)>;

  BasicTape() = default;
  BasicTape(const BasicTape&) = delete;
  BasicTape& operator=(const BasicTape&) = delete;
  BasicTape(BasicTape&&) = delete;
  BasicTape& operator=(BasicTape&&) = delete;

  NodeRef parameter(Matrix value) { return push(OpKind::kLeaf, std::move(value), true, nullptr); }
  NodeRef constant(Matrix value) { return push(OpKind::kLeaf, std::move(value), false, nullptr); }
  NodeRef scalar_parameter(Scalar v) { return parameter(Matrix::Constant(1, 1, v)); }
  NodeRef scalar_constant(Scalar v) { return constant(Matrix::Constant(1, 1, v)); }

  /// Appends an operation result. The rule is kept only when some input
  /// participates in differentiation.
  NodeRef record(OpKind op, Matrix value, std::initializer_list<NodeRef> inputs, BackwardRule rule) {
    bool needs = false;
    for (const NodeRef& in : inputs) {
      check(in);
      needs = needs || nodes_[in.index()].requires_grad;
    }
    return push(op, std::move(value), needs, needs ? std::move(rule) : nullptr);
  }

  bool owns(const NodeRef& ref) const { return ref.tape_ == this && ref.index_ < nodes_.size(); }

  void check(const NodeRef& ref) const {
    if (!owns(ref)) throw ContractViolation("NodeRef does not belong to this tape");
  }

  const Matrix& value(const NodeRef& ref) const {
    check(ref);
    return nodes_[ref.index()].value;
  }

  bool requires_grad(const NodeRef& ref) const {
    check(ref);
    return nodes_[ref.index()].requires_grad;
  }

  OpKind op(const NodeRef& ref) const {
    check(ref);
    return nodes_[ref.index()].op;
  }

  /// Gradient of the last backward() loss with respect to this node; zeros
  /// when the node was not reached.
  Matrix grad(const NodeRef& ref) const {
    check(ref);
    const Node& n = nodes_[ref.index()];
    if (!n.has_grad) return Matrix::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  /// Adds a gradient contribution to `target`. Used by backward rules.
  template <typename Derived>
  void accumulate(const NodeRef& target, const Eigen::MatrixBase<Derived>& g) {
    Node& n = nodes_[target.index()];
    if (!n.requires_grad) return;
    if (!n.has_grad) {
      n.grad = fault_scale_ * g;
      n.has_grad = true;
    } else {
      n.grad += fault_scale_ * g;
    }
  }

  /// Reverse sweep from a 1x1 loss. Gradients from a previous sweep are
  /// discarded, so the same tape can be differentiated from several losses.
  void backward(const NodeRef& loss) {
    check(loss);
    const Matrix& lv = nodes_[loss.index()].value;
    if (lv.rows() != 1 || lv.cols() != 1) {
      throw ContractViolation("backward: loss must be 1x1, got " + shape_string(lv));
    }
    for (Node& n : nodes_) {
      n.has_grad = false;
      n.grad.resize(0, 0);
    }
    Node& root = nodes_[loss.index()];
    if (!root.requires_grad) return;
    root.grad = Matrix::Ones(1, 1);
    root.has_grad = true;
    for (std::uint32_t i = loss.index() + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.has_grad || !n.rule) continue;
      fault_scale_ = (corrupted_ && *corrupted_ == n.op) ? Scalar(1.5) : Scalar(1);
      n.rule(*this, n.grad);
    }
    fault_scale_ = Scalar(1);
  }

  std::size_t size() const { return nodes_.size(); }

  /// Fault injection: every gradient produced by rules of `op` is scaled by
  /// 1.5, which any finite-difference check must detect.
  void corrupt_rule(std::optional<OpKind> op) { corrupted_ = op; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    OpKind op = OpKind::kLeaf;
    bool requires_grad = false;
    bool has_grad = false;
    BackwardRule rule;
  };

  NodeRef push(OpKind op, Matrix value, bool requires_grad, BackwardRule rule) {
    Node n;
    n.value = std::move(value);
    n.op = op;
    n.requires_grad = requires_grad;
    n.rule = std::move(rule);
    nodes_.push_back(std::move(n));
    return NodeRef(this, static_cast<std::uint32_t>(nodes_.size() - 1));
  }

  std::vector<Node> nodes_;
  std::optional<OpKind> corrupted_;
  Scalar fault_scale_ = Scalar(1);
};

template <typename Scalar>
Scalar BasicNodeRef<Scalar>::item() const {
  const auto& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw ContractViolation("item: expected 1x1, got " + shape_string(v));
  }
  return v(0, 0);
}

template <typename Scalar>
void backward(const BasicNodeRef<Scalar>& loss) {
  loss.tape().backward(loss);
}

using Tape = BasicTape<double>;
using NodeRef = BasicNodeRef<double>;
using Matrix = MatrixX<double>;

}  // namespace ccasgnn::numcore
