// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "autoheal/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace autoheal::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void gemv_avx2(std::span<const double> w, std::span<const double> x, std::span<const double> b,
               std::span<double> y, std::size_t rows, std::size_t cols) {
  const double* xp = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w.data() + r * cols;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 8 <= cols; c += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(xp + c), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c + 4), _mm256_loadu_pd(xp + c + 4), acc1);
    }
    for (; c + 4 <= cols; c += 4)
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(xp + c), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; c < cols; ++c) acc += row[c] * xp[c];
    y[r] = acc + b[r];
  }
}

void gemv_t_avx2(std::span<const double> w, std::span<const double> g, std::span<double> y,
                 std::size_t rows, std::size_t cols) {
  double* yp = y.data();
  for (std::size_t c = 0; c < cols; ++c) yp[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w.data() + r * cols;
    const __m256d gr = _mm256_set1_pd(g[r]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4)
      _mm256_storeu_pd(yp + c, _mm256_fmadd_pd(gr, _mm256_loadu_pd(row + c), _mm256_loadu_pd(yp + c)));
    for (; c < cols; ++c) yp[c] += g[r] * row[c];
  }
}

void ger_avx2(std::span<const double> g, std::span<const double> x, std::span<double> grad,
              std::size_t rows, std::size_t cols) {
  const double* xp = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = grad.data() + r * cols;
    const __m256d gr = _mm256_set1_pd(g[r]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4)
      _mm256_storeu_pd(row + c, _mm256_fmadd_pd(gr, _mm256_loadu_pd(xp + c), _mm256_loadu_pd(row + c)));
    for (; c < cols; ++c) row[c] += g[r] * xp[c];
  }
}

void adam_avx2(std::span<double> param, std::span<const double> grad, std::span<double> m,
               std::span<double> v, double lr_t, double beta1, double beta2, double eps) {
  const __m256d b1 = _mm256_set1_pd(beta1), b1c = _mm256_set1_pd(1.0 - beta1);
  const __m256d b2 = _mm256_set1_pd(beta2), b2c = _mm256_set1_pd(1.0 - beta2);
  const __m256d lr = _mm256_set1_pd(lr_t), ep = _mm256_set1_pd(eps);
  const std::size_t n = param.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(grad.data() + i);
    __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m.data() + i)), _mm256_mul_pd(b1c, gi));
    __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v.data() + i)),
                               _mm256_mul_pd(_mm256_mul_pd(b2c, gi), gi));
    _mm256_storeu_pd(m.data() + i, mi);
    _mm256_storeu_pd(v.data() + i, vi);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, mi), _mm256_add_pd(_mm256_sqrt_pd(vi), ep));
    _mm256_storeu_pd(param.data() + i, _mm256_sub_pd(_mm256_loadu_pd(param.data() + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    param[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps);
  }
}

constexpr KernelTable kAvx2{gemv_avx2, gemv_t_avx2, ger_avx2, adam_avx2, Isa::Avx2};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace autoheal::kernels
