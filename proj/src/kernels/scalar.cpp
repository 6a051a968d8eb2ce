#include "autoheal/kernels.hpp"

#include <cmath>

namespace autoheal::kernels {
namespace {

void gemv_scalar(std::span<const double> w, std::span<const double> x, std::span<const double> b,
                 std::span<double> y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc + b[r];
  }
}

void gemv_t_scalar(std::span<const double> w, std::span<const double> g, std::span<double> y,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w.data() + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) y[c] += gr * row[c];
  }
}

void ger_scalar(std::span<const double> g, std::span<const double> x, std::span<double> grad,
                std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = grad.data() + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += gr * x[c];
  }
}

void adam_scalar(std::span<double> param, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, double lr_t, double beta1, double beta2, double eps) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    param[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps);
  }
}

constexpr KernelTable kScalar{gemv_scalar, gemv_t_scalar, ger_scalar, adam_scalar, Isa::Scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace autoheal::kernels
