#include "exgen/optimizer.hpp"

#include <cmath>

#include "exgen/error.hpp"

namespace exgen {

void Adam::step(const std::vector<Tensor*>& params,
                const std::vector<const Tensor*>& grads) {
  if (params.size() != grads.size())
    throw ContractViolation("Adam::step: parameter/gradient count mismatch");
  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor* p : params) {
      m_.emplace_back(p->rows, p->cols);
      v_.emplace_back(p->rows, p->cols);
    }
  }
  if (m_.size() != params.size())
    throw ContractViolation("Adam::step: parameter count changed between steps");
  for (std::size_t k = 0; k < params.size(); ++k)
    if (!params[k]->same_shape(*grads[k]) || !params[k]->same_shape(m_[k]))
      throw ContractViolation("Adam::step: shape mismatch at parameter " +
                              std::to_string(k));

  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    const Tensor& g = *grads[k];
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const double gi = g.data[i];
      m.data[i] = cfg_.beta1 * m.data[i] + (1.0 - cfg_.beta1) * gi;
      v.data[i] = cfg_.beta2 * v.data[i] + (1.0 - cfg_.beta2) * gi * gi;
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      p.data[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace exgen
