#include "hpn/tape.hpp"

#include "hpn/errors.hpp"

namespace hpn {

NodeId Tape::leaf(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, nullptr});
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Tape::param(const std::string& name, Tensor value) {
  for (const auto& [existing, id] : params_)
    if (existing == name) throw ContractError("tape: duplicate parameter '" + name + "'");
  const NodeId id = leaf(std::move(value));
  params_.emplace_back(name, id);
  return id;
}

NodeId Tape::emit(std::unique_ptr<TapeOp> op, Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, std::move(op)});
  return static_cast<NodeId>(nodes_.size()) - 1;
}

const Tensor& Tape::grad(NodeId id) { return mutable_grad(id); }

Tensor& Tape::mutable_grad(NodeId id) {
  Node& n = node(id);
  if (n.grad.empty()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

Gradients Tape::grad_eval(NodeId loss) {
  if (loss < 0 || loss >= node_count()) throw ContractError("grad_eval: loss node out of range");
  if (value(loss).size() != 1) throw ContractError("grad_eval: loss must be scalar, got " + value(loss).shape_str());

  for (auto& n : nodes_)
    if (!n.grad.empty()) n.grad.fill(0.0);
  mutable_grad(loss)[0] = 1.0;

  for (NodeId id = loss; id >= 0; --id) {
    Node& n = node(id);
    if (!n.op || n.grad.empty()) continue;
    n.op->backward(*this, id);
  }

  Gradients out;
  for (const auto& [name, id] : params_) {
    Node& n = node(id);
    out.emplace(name, n.grad.empty() ? Tensor(n.value.shape()) : n.grad);
  }
  return out;
}

void Tape::replay() {
  for (NodeId id = 0; id < node_count(); ++id) {
    Node& n = node(id);
    if (n.op) n.op->forward(*this, id);
  }
}

}  // namespace hpn
