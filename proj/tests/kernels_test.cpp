#include <cmath>
#include <random>

#include "autoheal/dqn.hpp"
#include "autoheal/kernels.hpp"
#include "doctest.h"

using namespace autoheal;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void close(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar and avx2 kernels agree") {
  const auto* avx = kernels::avx2_table();
  if (!avx || !kernels::cpu_has_avx2()) {
    MESSAGE("avx2 variant unavailable, nothing to compare");
    return;
  }
  const auto& sc = kernels::scalar_table();
  std::mt19937_64 rng(1);
  for (std::size_t rows : {1, 3, 4, 7, 24, 33}) {
    for (std::size_t cols : {1, 2, 5, 8, 24, 124}) {
      const auto w = random_vec(rows * cols, rng), x = random_vec(cols, rng), b = random_vec(rows, rng);
      const auto g = random_vec(rows, rng);
      std::vector<double> y1(rows), y2(rows);
      sc.gemv(w, x, b, y1, rows, cols);
      avx->gemv(w, x, b, y2, rows, cols);
      close(y1, y2);

      std::vector<double> t1(cols), t2(cols);
      sc.gemv_t(w, g, t1, rows, cols);
      avx->gemv_t(w, g, t2, rows, cols);
      close(t1, t2);

      auto g1 = random_vec(rows * cols, rng);
      auto g2 = g1;
      sc.ger(g, x, g1, rows, cols);
      avx->ger(g, x, g2, rows, cols);
      close(g1, g2);

      auto p1 = random_vec(rows * cols, rng);
      auto m1 = random_vec(rows * cols, rng), v1 = random_vec(rows * cols, rng);
      for (auto& v : v1) v = std::abs(v);
      auto p2 = p1, m2 = m1, v2 = v1;
      const auto grad = random_vec(rows * cols, rng);
      sc.adam(p1, grad, m1, v1, 1e-3, 0.9, 0.999, 1e-8);
      avx->adam(p2, grad, m2, v2, 1e-3, 0.9, 0.999, 1e-8);
      close(p1, p2);
      close(m1, m2);
      close(v1, v2);
    }
  }
}

TEST_CASE("dispatch can be pinned") {
  const auto previous = kernels::active().isa;
  CHECK(kernels::select(kernels::Isa::Scalar) == kernels::Isa::Scalar);
  CHECK(kernels::active().isa == kernels::Isa::Scalar);

  dqn::QNetwork net({124, 24, 24, 8}, 3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> x(124);
  for (auto& v : x) v = d(rng);
  const auto scalar_q = net.forward(x);
  if (kernels::select(kernels::Isa::Avx2) == kernels::Isa::Avx2) close(scalar_q, net.forward(x));
  kernels::select(previous);
  CHECK(!kernels::isa_name(kernels::active().isa).empty());
}

}
