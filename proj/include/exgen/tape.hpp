#pragma once
#include <vector>

#include "exgen/tensor.hpp"

namespace exgen {

// Reverse-mode autodiff over dense tensors. Nodes are appended in topological
// order; forward values are computed eagerly and replaying a tape reproduces
// them bit-for-bit (the backward pass never touches stored values).
// No broadcasting beyond scalar-tensor.
class Tape {
 public:
  using Id = int;

  Id leaf(Tensor v, bool requires_grad = true);
  Id constant(Tensor v) { return leaf(std::move(v), false); }

  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id mul(Id a, Id b);        // elementwise
  Id div(Id a, Id b);        // elementwise
  Id matmul(Id a, Id b);
  Id exp(Id a);
  Id log(Id a);
  Id tanh(Id a);
  Id softplus(Id a);
  Id square(Id a);
  Id sigmoid(Id a);
  Id sum(Id a);              // -> 1x1
  Id mean(Id a);             // -> 1x1
  Id slice_cols(Id a, std::size_t lo, std::size_t hi);  // [lo, hi)
  Id concat_cols(Id a, Id b);
  Id scalar_mul(Id a, double c);
  Id scalar_add(Id a, double c);

  const Tensor& value(Id id) const { return nodes_[check(id)].val; }
  const Tensor& grad(Id id) const;

  // Accumulates d(root)/d(node) into every grad-requiring node.
  // root must be scalar.
  void backward(Id root);

  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  enum class Op {
    Leaf, Add, Sub, Mul, Div, MatMul, Exp, Log, Tanh, Softplus,
    Square, Sigmoid, Sum, Mean, SliceCols, ConcatCols, ScalarMul, ScalarAdd
  };

  struct Node {
    Op op;
    Id a = -1;
    Id b = -1;
    double c = 0.0;
    std::size_t lo = 0, hi = 0;
    Tensor val;
    Tensor grad;
    bool requires_grad = false;
    bool grad_ready = false;
  };

  Id push(Node n, const char* op_name);
  std::size_t check(Id id) const;
  void accumulate(Id target, const Tensor& g);

  std::vector<Node> nodes_;
  bool ran_backward_ = false;
};

}  // namespace exgen
