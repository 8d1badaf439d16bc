#include "exgen/mlp.hpp"

#include <cmath>

#include "exgen/error.hpp"

namespace exgen {

Mlp Mlp::init(std::size_t in, const std::vector<std::size_t>& hidden,
              std::size_t out, Rng& rng) {
  Mlp mlp;
  mlp.in_dim = in;
  mlp.out_dim = out;
  std::size_t prev = in;
  std::vector<std::size_t> dims = hidden;
  dims.push_back(out);
  for (std::size_t d : dims) {
    Tensor w(prev + 1, d);
    const double s = std::sqrt(6.0 / static_cast<double>(prev + d));
    for (std::size_t i = 0; i < prev; ++i)
      for (std::size_t j = 0; j < d; ++j) w.at(i, j) = rng.uniform(-s, s);
    // bias row stays zero
    mlp.weights.push_back(std::move(w));
    prev = d;
  }
  return mlp;
}

std::vector<Tape::Id> Mlp::push_weights(Tape& t, bool requires_grad) const {
  std::vector<Tape::Id> ids;
  ids.reserve(weights.size());
  for (const Tensor& w : weights) ids.push_back(t.leaf(w, requires_grad));
  return ids;
}

Tape::Id Mlp::forward(Tape& t, Tape::Id x, const std::vector<Tape::Id>& w) {
  Tape::Id h = x;
  for (std::size_t l = 0; l < w.size(); ++l) {
    const std::size_t n = t.value(h).rows;
    Tape::Id aug = t.concat_cols(h, t.constant(Tensor(n, 1, 1.0)));
    h = t.matmul(aug, w[l]);
    if (l + 1 < w.size()) h = t.tanh(h);
  }
  return h;
}

Tensor Mlp::forward_plain(const Tensor& x) const {
  if (x.cols != in_dim) throw ContractViolation("Mlp::forward_plain: bad input width");
  Tensor h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Tensor aug(h.rows, h.cols + 1);
    for (std::size_t i = 0; i < h.rows; ++i) {
      for (std::size_t j = 0; j < h.cols; ++j) aug.at(i, j) = h.at(i, j);
      aug.at(i, h.cols) = 1.0;
    }
    Tensor y;
    kernels::matmul(aug, weights[l], y,
                    kernels::default_exec(aug.rows * aug.cols * weights[l].cols));
    if (l + 1 < weights.size()) {
      Tensor act;
      kernels::ew_unary(y, act, [](double v) { return std::tanh(v); },
                        kernels::default_exec(y.size()));
      h = std::move(act);
    } else {
      h = std::move(y);
    }
  }
  return h;
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const Tensor& w : weights) n += w.size();
  return n;
}

}  // namespace exgen
