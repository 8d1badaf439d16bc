#include "exgen/tape.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "exgen/error.hpp"

namespace exgen {

using kernels::Exec;
using kernels::default_exec;

namespace {

double f_exp(double x) { return std::exp(x); }
double f_log(double x) { return std::log(x); }
double f_tanh(double x) { return std::tanh(x); }
double f_square(double x) { return x * x; }
double f_sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
double f_softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}
double f_add(double a, double b) { return a + b; }
double f_sub(double a, double b) { return a - b; }
double f_mul(double a, double b) { return a * b; }
double f_div(double a, double b) { return a / b; }

}  // namespace

std::size_t Tape::check(Id id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
    throw ContractViolation("Tape: invalid node id " + std::to_string(id));
  return static_cast<std::size_t>(id);
}

Tape::Id Tape::push(Node n, const char* op_name) {
  if (!n.val.all_finite())
    throw NumericFailure(std::string("non-finite value produced by primitive '") +
                         op_name + "'");
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::leaf(Tensor v, bool requires_grad) {
  Node n;
  n.op = Op::Leaf;
  n.val = std::move(v);
  n.requires_grad = requires_grad;
  return push(std::move(n), "leaf");
}

Tape::Id Tape::add(Id a, Id b) {
  const Node& na = nodes_[check(a)];
  const Node& nb = nodes_[check(b)];
  Node n;
  n.op = Op::Add;
  n.a = a;
  n.b = b;
  ew_binary(na.val, nb.val, n.val, f_add, default_exec(na.val.size()));
  n.requires_grad = na.requires_grad || nb.requires_grad;
  return push(std::move(n), "add");
}

Tape::Id Tape::sub(Id a, Id b) {
  const Node& na = nodes_[check(a)];
  const Node& nb = nodes_[check(b)];
  Node n;
  n.op = Op::Sub;
  n.a = a;
  n.b = b;
  ew_binary(na.val, nb.val, n.val, f_sub, default_exec(na.val.size()));
  n.requires_grad = na.requires_grad || nb.requires_grad;
  return push(std::move(n), "sub");
}

Tape::Id Tape::mul(Id a, Id b) {
  const Node& na = nodes_[check(a)];
  const Node& nb = nodes_[check(b)];
  Node n;
  n.op = Op::Mul;
  n.a = a;
  n.b = b;
  ew_binary(na.val, nb.val, n.val, f_mul, default_exec(na.val.size()));
  n.requires_grad = na.requires_grad || nb.requires_grad;
  return push(std::move(n), "mul");
}

Tape::Id Tape::div(Id a, Id b) {
  const Node& na = nodes_[check(a)];
  const Node& nb = nodes_[check(b)];
  Node n;
  n.op = Op::Div;
  n.a = a;
  n.b = b;
  ew_binary(na.val, nb.val, n.val, f_div, default_exec(na.val.size()));
  n.requires_grad = na.requires_grad || nb.requires_grad;
  return push(std::move(n), "div");
}

Tape::Id Tape::matmul(Id a, Id b) {
  const Node& na = nodes_[check(a)];
  const Node& nb = nodes_[check(b)];
  Node n;
  n.op = Op::MatMul;
  n.a = a;
  n.b = b;
  kernels::matmul(na.val, nb.val, n.val,
                  default_exec(na.val.rows * na.val.cols * nb.val.cols));
  n.requires_grad = na.requires_grad || nb.requires_grad;
  return push(std::move(n), "matmul");
}

#define EXGEN_UNARY_OP(NAME, OP, FN)                                   \
  Tape::Id Tape::NAME(Id a) {                                          \
    const Node& na = nodes_[check(a)];                                 \
    Node n;                                                            \
    n.op = Op::OP;                                                     \
    n.a = a;                                                           \
    ew_unary(na.val, n.val, FN, default_exec(na.val.size()));          \
    n.requires_grad = na.requires_grad;                                \
    return push(std::move(n), #NAME);                                  \
  }

EXGEN_UNARY_OP(exp, Exp, f_exp)
EXGEN_UNARY_OP(log, Log, f_log)
EXGEN_UNARY_OP(tanh, Tanh, f_tanh)
EXGEN_UNARY_OP(softplus, Softplus, f_softplus)
EXGEN_UNARY_OP(square, Square, f_square)
EXGEN_UNARY_OP(sigmoid, Sigmoid, f_sigmoid)
#undef EXGEN_UNARY_OP

Tape::Id Tape::sum(Id a) {
  const Node& na = nodes_[check(a)];
  Node n;
  n.op = Op::Sum;
  n.a = a;
  n.val = Tensor::scalar(kernels::reduce_sum(na.val, default_exec(na.val.size())));
  n.requires_grad = na.requires_grad;
  return push(std::move(n), "sum");
}

Tape::Id Tape::mean(Id a) {
  const Node& na = nodes_[check(a)];
  if (na.val.size() == 0) throw ContractViolation("mean: empty tensor");
  Node n;
  n.op = Op::Mean;
  n.a = a;
  n.val = Tensor::scalar(kernels::reduce_sum(na.val, default_exec(na.val.size())) /
                         static_cast<double>(na.val.size()));
  n.requires_grad = na.requires_grad;
  return push(std::move(n), "mean");
}

Tape::Id Tape::slice_cols(Id a, std::size_t lo, std::size_t hi) {
  const Node& na = nodes_[check(a)];
  if (lo >= hi || hi > na.val.cols)
    throw ContractViolation("slice_cols: bad column range");
  Node n;
  n.op = Op::SliceCols;
  n.a = a;
  n.lo = lo;
  n.hi = hi;
  n.val = Tensor(na.val.rows, hi - lo);
  for (std::size_t i = 0; i < na.val.rows; ++i)
    for (std::size_t j = lo; j < hi; ++j)
      n.val.at(i, j - lo) = na.val.at(i, j);
  n.requires_grad = na.requires_grad;
  return push(std::move(n), "slice_cols");
}

Tape::Id Tape::concat_cols(Id a, Id b) {
  const Node& na = nodes_[check(a)];
  const Node& nb = nodes_[check(b)];
  if (na.val.rows != nb.val.rows)
    throw ContractViolation("concat_cols: row counts differ");
  Node n;
  n.op = Op::ConcatCols;
  n.a = a;
  n.b = b;
  n.val = Tensor(na.val.rows, na.val.cols + nb.val.cols);
  for (std::size_t i = 0; i < na.val.rows; ++i) {
    for (std::size_t j = 0; j < na.val.cols; ++j) n.val.at(i, j) = na.val.at(i, j);
    for (std::size_t j = 0; j < nb.val.cols; ++j)
      n.val.at(i, na.val.cols + j) = nb.val.at(i, j);
  }
  n.requires_grad = na.requires_grad || nb.requires_grad;
  return push(std::move(n), "concat_cols");
}

Tape::Id Tape::scalar_mul(Id a, double c) {
  const Node& na = nodes_[check(a)];
  Node n;
  n.op = Op::ScalarMul;
  n.a = a;
  n.c = c;
  n.val = na.val;
  for (auto& v : n.val.data) v *= c;
  n.requires_grad = na.requires_grad;
  return push(std::move(n), "scalar_mul");
}

Tape::Id Tape::scalar_add(Id a, double c) {
  const Node& na = nodes_[check(a)];
  Node n;
  n.op = Op::ScalarAdd;
  n.a = a;
  n.c = c;
  n.val = na.val;
  for (auto& v : n.val.data) v += c;
  n.requires_grad = na.requires_grad;
  return push(std::move(n), "scalar_add");
}

const Tensor& Tape::grad(Id id) const {
  const Node& n = nodes_[check(id)];
  if (!ran_backward_ || !n.grad_ready)
    throw ContractViolation("Tape::grad: backward has not populated this node");
  return n.grad;
}

void Tape::accumulate(Id target, const Tensor& g) {
  Node& t = nodes_[static_cast<std::size_t>(target)];
  if (!t.requires_grad) return;
  if (!t.grad_ready) {
    t.grad = Tensor(t.val.rows, t.val.cols);
    t.grad_ready = true;
  }
  for (std::size_t i = 0; i < g.data.size(); ++i) t.grad.data[i] += g.data[i];
}

void Tape::backward(Id root) {
  const std::size_t r = check(root);
  if (nodes_[r].val.rows != 1 || nodes_[r].val.cols != 1)
    throw ContractViolation("Tape::backward: loss must be scalar");
  for (auto& n : nodes_) {
    n.grad_ready = false;
    n.grad = Tensor();
  }
  ran_backward_ = true;
  if (!nodes_[r].requires_grad) return;
  accumulate(root, Tensor::scalar(1.0));

  for (Id id = root; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.grad_ready || n.op == Op::Leaf) continue;
    const Tensor& g = n.grad;
    const Node* pa = n.a >= 0 ? &nodes_[static_cast<std::size_t>(n.a)] : nullptr;
    const Node* pb = n.b >= 0 ? &nodes_[static_cast<std::size_t>(n.b)] : nullptr;
    switch (n.op) {
      case Op::Add:
        if (pa->requires_grad) accumulate(n.a, g);
        if (pb->requires_grad) accumulate(n.b, g);
        break;
      case Op::Sub: {
        if (pa->requires_grad) accumulate(n.a, g);
        if (pb->requires_grad) {
          Tensor t = g;
          for (auto& v : t.data) v = -v;
          accumulate(n.b, t);
        }
        break;
      }
      case Op::Mul: {
        Tensor t;
        if (pa->requires_grad) {
          ew_binary(g, pb->val, t, f_mul, default_exec(g.size()));
          accumulate(n.a, t);
        }
        if (pb->requires_grad) {
          ew_binary(g, pa->val, t, f_mul, default_exec(g.size()));
          accumulate(n.b, t);
        }
        break;
      }
      case Op::Div: {
        Tensor t;
        if (pa->requires_grad) {
          ew_binary(g, pb->val, t, f_div, default_exec(g.size()));
          accumulate(n.a, t);
        }
        if (pb->requires_grad) {
          // d(a/b)/db = -a/b^2 = -out/b
          Tensor q;
          ew_binary(n.val, pb->val, q, f_div, default_exec(g.size()));
          ew_binary(g, q, t, f_mul, default_exec(g.size()));
          for (auto& v : t.data) v = -v;
          accumulate(n.b, t);
        }
        break;
      }
      case Op::MatMul: {
        Tensor t;
        if (pa->requires_grad) {
          Tensor bt = pb->val.transposed();
          kernels::matmul(g, bt, t, default_exec(g.rows * g.cols * bt.cols));
          accumulate(n.a, t);
        }
        if (pb->requires_grad) {
          Tensor at = pa->val.transposed();
          kernels::matmul(at, g, t, default_exec(at.rows * at.cols * g.cols));
          accumulate(n.b, t);
        }
        break;
      }
      case Op::Exp: {
        Tensor t;
        ew_binary(g, n.val, t, f_mul, default_exec(g.size()));
        accumulate(n.a, t);
        break;
      }
      case Op::Log: {
        Tensor t;
        ew_binary(g, pa->val, t, f_div, default_exec(g.size()));
        accumulate(n.a, t);
        break;
      }
      case Op::Tanh: {
        Tensor t(g.rows, g.cols);
        for (std::size_t i = 0; i < g.data.size(); ++i)
          t.data[i] = g.data[i] * (1.0 - n.val.data[i] * n.val.data[i]);
        accumulate(n.a, t);
        break;
      }
      case Op::Softplus: {
        Tensor t(g.rows, g.cols);
        for (std::size_t i = 0; i < g.data.size(); ++i)
          t.data[i] = g.data[i] * f_sigmoid(pa->val.data[i]);
        accumulate(n.a, t);
        break;
      }
      case Op::Square: {
        Tensor t(g.rows, g.cols);
        for (std::size_t i = 0; i < g.data.size(); ++i)
          t.data[i] = 2.0 * g.data[i] * pa->val.data[i];
        accumulate(n.a, t);
        break;
      }
      case Op::Sigmoid: {
        Tensor t(g.rows, g.cols);
        for (std::size_t i = 0; i < g.data.size(); ++i)
          t.data[i] = g.data[i] * n.val.data[i] * (1.0 - n.val.data[i]);
        accumulate(n.a, t);
        break;
      }
      case Op::Sum: {
        Tensor t(pa->val.rows, pa->val.cols, g.data[0]);
        accumulate(n.a, t);
        break;
      }
      case Op::Mean: {
        Tensor t(pa->val.rows, pa->val.cols,
                 g.data[0] / static_cast<double>(pa->val.size()));
        accumulate(n.a, t);
        break;
      }
      case Op::SliceCols: {
        Tensor t(pa->val.rows, pa->val.cols);
        for (std::size_t i = 0; i < g.rows; ++i)
          for (std::size_t j = 0; j < g.cols; ++j)
            t.at(i, n.lo + j) = g.at(i, j);
        accumulate(n.a, t);
        break;
      }
      case Op::ConcatCols: {
        if (pa->requires_grad) {
          Tensor t(pa->val.rows, pa->val.cols);
          for (std::size_t i = 0; i < t.rows; ++i)
            for (std::size_t j = 0; j < t.cols; ++j) t.at(i, j) = g.at(i, j);
          accumulate(n.a, t);
        }
        if (pb->requires_grad) {
          Tensor t(pb->val.rows, pb->val.cols);
          for (std::size_t i = 0; i < t.rows; ++i)
            for (std::size_t j = 0; j < t.cols; ++j)
              t.at(i, j) = g.at(i, pa->val.cols + j);
          accumulate(n.b, t);
        }
        break;
      }
      case Op::ScalarMul: {
        Tensor t = g;
        for (auto& v : t.data) v *= n.c;
        accumulate(n.a, t);
        break;
      }
      case Op::ScalarAdd:
        accumulate(n.a, g);
        break;
      case Op::Leaf:
        break;
    }
  }
}

void Tape::clear() {
  nodes_.clear();
  ran_backward_ = false;
}

}  // namespace exgen
