#include "exgen/tensor.hpp"

#include <cmath>
#include <utility>

#include "exgen/error.hpp"

namespace exgen {

Tensor::Tensor(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
  if (data.size() != rows * cols)
    throw ContractViolation("Tensor: data length does not match shape");
}

Tensor Tensor::scalar(double v) { return Tensor(1, 1, std::vector<double>{v}); }

Tensor Tensor::row(std::vector<double> d) {
  std::size_t n = d.size();
  return Tensor(1, n, std::move(d));
}

Tensor Tensor::transposed() const {
  Tensor t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t.data[j * rows + i] = data[i * cols + j];
  return t;
}

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace kernels {

Exec default_exec(std::size_t work_items) {
  return work_items >= 16384 ? Exec::Parallel : Exec::Serial;
}

void matmul(const Tensor& a, const Tensor& b, Tensor& c, Exec exec) {
  if (a.cols != b.rows)
    throw ContractViolation("matmul: inner dimensions do not match");
  c.rows = a.rows;
  c.cols = b.cols;
  c.data.assign(a.rows * b.cols, 0.0);
  const std::size_t m = a.rows, k = a.cols, n = b.cols;
  const double* ap = a.data.data();
  const double* bp = b.data.data();
  double* cp = c.data.data();
  // ikj order: C[i,:] accumulates serially over k, vectorizable over j.
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(m); ++i) {
      double* crow = cp + static_cast<std::size_t>(i) * n;
      const double* arow = ap + static_cast<std::size_t>(i) * k;
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double av = arow[kk];
        const double* brow = bp + kk * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      double* crow = cp + i * n;
      const double* arow = ap + i * k;
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double av = arow[kk];
        const double* brow = bp + kk * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  }
}

void ew_unary(const Tensor& a, Tensor& out, double (*f)(double), Exec exec) {
  out.rows = a.rows;
  out.cols = a.cols;
  out.data.resize(a.size());
  const std::size_t n = a.size();
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      out.data[i] = f(a.data[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out.data[i] = f(a.data[i]);
  }
}

void ew_binary(const Tensor& a, const Tensor& b, Tensor& out,
               double (*f)(double, double), Exec exec) {
  if (!a.same_shape(b)) throw ContractViolation("ew_binary: shape mismatch");
  out.rows = a.rows;
  out.cols = a.cols;
  out.data.resize(a.size());
  const std::size_t n = a.size();
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      out.data[i] = f(a.data[i], b.data[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out.data[i] = f(a.data[i], b.data[i]);
  }
}

double reduce_sum(const Tensor& a, Exec exec) {
  const std::size_t m = a.rows, n = a.cols;
  std::vector<double> partial(m, 0.0);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(m); ++i) {
      double s = 0.0;
      const double* row = a.data.data() + static_cast<std::size_t>(i) * n;
      for (std::size_t j = 0; j < n; ++j) s += row[j];
      partial[i] = s;
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      const double* row = a.data.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) s += row[j];
      partial[i] = s;
    }
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace kernels

}  // namespace exgen
