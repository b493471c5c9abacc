#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hpn/tensor.hpp"

namespace hpn {

class Tape;
using NodeId = int;

/// Per-parameter gradients keyed by parameter name. Ordered so iteration is
/// deterministic.
using Gradients = std::map<std::string, Tensor>;

/// One recorded primitive. forward() recomputes the node value from its input
/// values; backward() scatters the node's gradient into its inputs' gradients.
struct TapeOp {
  virtual ~TapeOp() = default;
  virtual const char* name() const = 0;
  virtual void forward(Tape& tape, NodeId self) = 0;
  virtual void backward(Tape& tape, NodeId self) = 0;
  std::vector<NodeId> inputs;
};

/// Ordered record of executed primitives. Nodes are appended as operations
/// run, so the record is topologically ordered by construction; a reverse
/// sweep visits consumers before producers.
class Tape {
 public:
  /// Non-trainable input leaf.
  NodeId leaf(Tensor value);

  /// Trainable leaf. Names must be unique within one tape.
  NodeId param(const std::string& name, Tensor value);

  NodeId emit(std::unique_ptr<TapeOp> op, Tensor value);

  const Tensor& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  Tensor& mutable_value(NodeId id) { return nodes_[static_cast<std::size_t>(id)].value; }

  /// Gradient of the last grad_eval loss w.r.t. this node (zeros before any
  /// backward pass).
  const Tensor& grad(NodeId id);
  Tensor& mutable_grad(NodeId id);

  /// Reverse-mode sweep from a scalar loss node. Returns one entry per
  /// registered parameter; parameters the loss does not reach keep zeros.
  Gradients grad_eval(NodeId loss);

  /// Re-executes every recorded primitive in order, overwriting node values.
  /// Leaves are untouched, so the result must be bit-identical to the
  /// original forward pass.
  void replay();

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<std::pair<std::string, NodeId>>& param_nodes() const { return params_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::unique_ptr<TapeOp> op;  // null for leaves
  };

  Node& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }

  std::vector<Node> nodes_;
  std::vector<std::pair<std::string, NodeId>> params_;
};

}  // namespace hpn
