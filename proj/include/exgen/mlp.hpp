#pragma once
#include <vector>

#include "exgen/rng.hpp"
#include "exgen/tape.hpp"
#include "exgen/tensor.hpp"

namespace exgen {

// Feed-forward network with tanh hidden layers and a linear output layer.
// Each layer weight is (in+1) x out with the bias folded into the last row,
// so the whole forward pass is matmul/concat/tanh on the tape.
struct Mlp {
  std::vector<Tensor> weights;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;

  static Mlp init(std::size_t in, const std::vector<std::size_t>& hidden,
                  std::size_t out, Rng& rng);

  std::vector<Tape::Id> push_weights(Tape& t, bool requires_grad) const;
  static Tape::Id forward(Tape& t, Tape::Id x, const std::vector<Tape::Id>& w);

  // Same arithmetic as the tape path (shared kernels), without recording.
  Tensor forward_plain(const Tensor& x) const;

  std::size_t param_count() const;
};

}  // namespace exgen
