#pragma once
#include <cstddef>
#include <vector>

namespace exgen {

// Dense row-major matrix of doubles. Scalars are 1x1, row vectors 1xn.
// Values are immutable by convention once handed to a Tape.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}
  Tensor(std::size_t r, std::size_t c, std::vector<double> d);

  static Tensor scalar(double v);
  static Tensor row(std::vector<double> d);

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  Tensor transposed() const;
  bool all_finite() const;
};

namespace kernels {

enum class Exec { Serial, Parallel };

// C = A * B. Each output element is accumulated by a single thread in a fixed
// order, so Serial and Parallel results are bit-identical.
void matmul(const Tensor& a, const Tensor& b, Tensor& c, Exec exec);

// Row-parallel elementwise map/zip; deterministic for the same reason.
void ew_unary(const Tensor& a, Tensor& out, double (*f)(double), Exec exec);
void ew_binary(const Tensor& a, const Tensor& b, Tensor& out,
               double (*f)(double, double), Exec exec);

// Sum of all entries via fixed-order per-row partials.
double reduce_sum(const Tensor& a, Exec exec);

Exec default_exec(std::size_t work_items);

}  // namespace kernels

}  // namespace exgen
