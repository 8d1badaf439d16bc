#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "exgen/error.hpp"
#include "exgen/mlp.hpp"
#include "exgen/optimizer.hpp"
#include "exgen/rng.hpp"
#include "exgen/tape.hpp"

using namespace exgen;

namespace {

// Central finite differences, step 1e-5, against the tape gradient.
// Loss builder receives the tape and leaf ids for each input tensor.
using LossFn = std::function<Tape::Id(Tape&, const std::vector<Tape::Id>&)>;

double eval_loss(const LossFn& fn, const std::vector<Tensor>& inputs) {
  Tape t;
  std::vector<Tape::Id> ids;
  for (const auto& in : inputs) ids.push_back(t.leaf(in));
  return t.value(fn(t, ids)).data[0];
}

double max_fd_rel_error(const LossFn& fn, const std::vector<Tensor>& inputs) {
  const double h = 1e-5;
  Tape t;
  std::vector<Tape::Id> ids;
  for (const auto& in : inputs) ids.push_back(t.leaf(in));
  Tape::Id loss = fn(t, ids);
  t.backward(loss);

  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Tensor& g = t.grad(ids[k]);
    for (std::size_t i = 0; i < inputs[k].data.size(); ++i) {
      std::vector<Tensor> lo = inputs, hi = inputs;
      lo[k].data[i] -= h;
      hi[k].data[i] += h;
      const double fd = (eval_loss(fn, hi) - eval_loss(fn, lo)) / (2.0 * h);
      const double ad = g.data[i];
      const double rel = std::fabs(ad - fd) / std::max({std::fabs(ad), std::fabs(fd), 1.0});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

Tensor random_tensor(Rng& rng, std::size_t r, std::size_t c, double lo, double hi) {
  Tensor t(r, c);
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("gradient of x^2 at 3 is 6") {
  Tape t;
  auto x = t.leaf(Tensor::scalar(3.0));
  auto loss = t.square(x);
  t.backward(loss);
  CHECK(t.grad(x).data[0] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("gradient of x*y at (2,5) is (5,2)") {
  Tape t;
  auto x = t.leaf(Tensor::scalar(2.0));
  auto y = t.leaf(Tensor::scalar(5.0));
  auto loss = t.mul(x, y);
  t.backward(loss);
  CHECK(t.grad(x).data[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(t.grad(y).data[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("every primitive matches finite differences on 100 random inputs") {
  Rng rng(42);
  struct Case {
    const char* name;
    LossFn fn;
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    double lo, hi;
  };
  std::vector<Case> cases = {
      {"add", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.add(v[0], v[1])); }, {{2, 3}, {2, 3}}, -2.0, 2.0},
      {"sub", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.square(t.sub(v[0], v[1]))); }, {{2, 3}, {2, 3}}, -2.0, 2.0},
      {"mul", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.mul(v[0], v[1])); }, {{2, 3}, {2, 3}}, -2.0, 2.0},
      {"div", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.div(v[0], v[1])); }, {{2, 3}, {2, 3}}, 0.5, 2.0},
      {"matmul", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.matmul(v[0], v[1])); }, {{2, 3}, {3, 4}}, -1.0, 1.0},
      {"exp", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.exp(v[0])); }, {{2, 3}}, -1.0, 1.0},
      {"log", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.log(v[0])); }, {{2, 3}}, 0.5, 2.0},
      {"tanh", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.tanh(v[0])); }, {{2, 3}}, -2.0, 2.0},
      {"softplus", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.softplus(v[0])); }, {{2, 3}}, -2.0, 2.0},
      {"square", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.square(v[0])); }, {{2, 3}}, -2.0, 2.0},
      {"sigmoid", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.sigmoid(v[0])); }, {{2, 3}}, -2.0, 2.0},
      {"mean", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.mean(t.square(v[0])); }, {{3, 3}}, -2.0, 2.0},
      {"slice_concat", [](Tape& t, const std::vector<Tape::Id>& v) {
         auto c = t.concat_cols(v[0], v[1]);
         auto s = t.slice_cols(c, 1, 4);
         return t.sum(t.square(s)); }, {{2, 3}, {2, 2}}, -2.0, 2.0},
      {"scalar_ops", [](Tape& t, const std::vector<Tape::Id>& v) {
         return t.sum(t.scalar_add(t.scalar_mul(v[0], 2.5), -0.75)); }, {{2, 3}}, -2.0, 2.0},
  };
  for (const auto& cs : cases) {
    CAPTURE(cs.name);
    double worst = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
      std::vector<Tensor> inputs;
      for (auto [r, c] : cs.shapes) inputs.push_back(random_tensor(rng, r, c, cs.lo, cs.hi));
      worst = std::max(worst, max_fd_rel_error(cs.fn, inputs));
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("two-layer network gradient matches finite differences") {
  Rng rng(7);
  Mlp net = Mlp::init(3, {8, 8}, 2, rng);
  Tensor x = random_tensor(rng, 4, 3, -1.0, 1.0);
  Tensor target = random_tensor(rng, 4, 2, -1.0, 1.0);

  LossFn fn = [&](Tape& t, const std::vector<Tape::Id>& v) {
    auto out = Mlp::forward(t, t.constant(x), v);
    return t.mean(t.square(t.sub(out, t.constant(target))));
  };
  std::vector<Tensor> params = net.weights;
  CHECK(max_fd_rel_error(fn, params) < 1e-5);
}

TEST_CASE("forward with gradients enabled equals forward without, bit-for-bit") {
  Rng rng(11);
  Mlp net = Mlp::init(3, {16, 16}, 2, rng);
  Tensor x = random_tensor(rng, 5, 3, -1.0, 1.0);

  Tape with_grad;
  auto out_g = Mlp::forward(with_grad, with_grad.constant(x),
                            net.push_weights(with_grad, true));
  Tape without;
  auto out_n = Mlp::forward(without, without.constant(x),
                            net.push_weights(without, false));
  Tensor plain = net.forward_plain(x);

  REQUIRE(with_grad.value(out_g).size() == plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    CHECK(with_grad.value(out_g).data[i] == without.value(out_n).data[i]);
    CHECK(with_grad.value(out_g).data[i] == plain.data[i]);
  }
}

TEST_CASE("non-scalar loss is a contract violation") {
  Tape t;
  auto x = t.leaf(Tensor(2, 2, 1.0));
  CHECK_THROWS_AS(t.backward(x), ContractViolation);
}

TEST_CASE("NaN in forward pass raises a numeric failure naming the primitive") {
  Tape t;
  auto x = t.leaf(Tensor::scalar(-1.0));
  try {
    t.log(x);
    FAIL("expected NumericFailure");
  } catch (const NumericFailure& e) {
    CHECK(std::string(e.what()).find("log") != std::string::npos);
  }
}

TEST_CASE("adam: zero gradient from fresh state leaves parameters unchanged") {
  Tensor p(2, 2, 3.5);
  Tensor g(2, 2, 0.0);
  Adam opt(AdamConfig{0.1, 0.9, 0.999, 1e-8});
  opt.step({&p}, {&g});
  for (double v : p.data) CHECK(v == 3.5);
  CHECK(opt.step_count() == 1);
}

TEST_CASE("adam: first step equals lr * g / (|g| + eps)") {
  const double lr = 0.1, eps = 1e-8;
  Tensor p(1, 3, {std::vector<double>{1.0, -2.0, 0.5}});
  Tensor g(1, 3, {std::vector<double>{0.3, -0.7, 2.0}});
  Tensor expect = p;
  for (std::size_t i = 0; i < 3; ++i)
    expect.data[i] -= lr * g.data[i] / (std::fabs(g.data[i]) + eps);
  Adam opt(AdamConfig{lr, 0.9, 0.999, eps});
  opt.step({&p}, {&g});
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(p.data[i] == doctest::Approx(expect.data[i]).epsilon(1e-12));
}

TEST_CASE("adam: lr=0 is the identity on parameters") {
  Tensor p(1, 2, {std::vector<double>{4.0, -1.0}});
  Tensor g(1, 2, {std::vector<double>{1.0, 2.0}});
  Adam opt(AdamConfig{0.0, 0.9, 0.999, 1e-8});
  for (int i = 0; i < 5; ++i) opt.step({&p}, {&g});
  CHECK(p.data[0] == 4.0);
  CHECK(p.data[1] == -1.0);
}

TEST_CASE("adam: 500 steps on x^2 from 5 converges below 0.05") {
  Tensor x = Tensor::scalar(5.0);
  Adam opt(AdamConfig{0.1, 0.9, 0.999, 1e-8});
  for (int i = 0; i < 500; ++i) {
    Tensor g = Tensor::scalar(2.0 * x.data[0]);
    opt.step({&x}, {&g});
  }
  CHECK(std::fabs(x.data[0]) < 0.05);
}

TEST_CASE("adam: shape mismatch is a contract violation") {
  Tensor p(2, 2);
  Tensor g(2, 3);
  Adam opt;
  CHECK_THROWS_AS(opt.step({&p}, {&g}), ContractViolation);
}

TEST_CASE("rng: identical seed and call sequence give identical output") {
  Rng a(0), b(0);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
  }
}

TEST_CASE("rng: split streams are independent of sibling draws") {
  Rng a(123);
  Rng b(123);
  (void)a.uniform();  // consuming from the parent must not shift children
  Rng ca = a.split("stage");
  Rng cb = b.split("stage");
  for (int i = 0; i < 100; ++i) CHECK(ca.next_u64() == cb.next_u64());
  Rng other = a.split("other");
  CHECK(other.next_u64() != a.split("stage").next_u64());
}

TEST_CASE("rng: uniform(0,1) sample mean near 0.5") {
  Rng rng(2024);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s += rng.uniform();
  CHECK(std::fabs(s / n - 0.5) < 0.01);
}

TEST_CASE("rng: normal sample variance near 1") {
  Rng rng(99);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal();
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::fabs(var - 1.0) < 0.05);
}

TEST_CASE("rng: lo >= hi is a contract violation") {
  Rng rng(1);
  CHECK_THROWS_AS(rng.uniform(2.0, 2.0), ContractViolation);
  CHECK_THROWS_AS(rng.uniform(3.0, 1.0), ContractViolation);
}

TEST_CASE("kernels: serial and parallel matmul are bit-identical") {
  Rng rng(5);
  Tensor a = random_tensor(rng, 37, 19, -1.0, 1.0);
  Tensor b = random_tensor(rng, 19, 23, -1.0, 1.0);
  Tensor cs, cp;
  kernels::matmul(a, b, cs, kernels::Exec::Serial);
  kernels::matmul(a, b, cp, kernels::Exec::Parallel);
  REQUIRE(cs.size() == cp.size());
  for (std::size_t i = 0; i < cs.size(); ++i) CHECK(cs.data[i] == cp.data[i]);

  CHECK(kernels::reduce_sum(a, kernels::Exec::Serial) ==
        kernels::reduce_sum(a, kernels::Exec::Parallel));
}
