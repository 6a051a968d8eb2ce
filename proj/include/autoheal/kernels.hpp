#pragma once

// Dense double-precision kernels behind the Q-network.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active table is chosen once at startup from the
// CPU feature bits and can be pinned for tests.

#include <cstddef>
#include <span>
#include <string_view>

namespace autoheal::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  /// y = W x + b, W row-major rows x cols.
  void (*gemv)(std::span<const double> w, std::span<const double> x, std::span<const double> b,
               std::span<double> y, std::size_t rows, std::size_t cols);
  /// y = W^T g, W row-major rows x cols, y has cols entries.
  void (*gemv_t)(std::span<const double> w, std::span<const double> g, std::span<double> y,
                 std::size_t rows, std::size_t cols);
  /// G += g x^T (rank-1 accumulate).
  void (*ger)(std::span<const double> g, std::span<const double> x, std::span<double> grad,
              std::size_t rows, std::size_t cols);
  /// One adaptive-moment step over a flat parameter block.
  void (*adam)(std::span<double> param, std::span<const double> grad, std::span<double> m,
               std::span<double> v, double lr_t, double beta1, double beta2, double eps);
  Isa isa;
};

const KernelTable& scalar_table();
/// Null when the binary was built without AVX2 support.
const KernelTable* avx2_table();

bool cpu_has_avx2();

/// Table in use by the library.
const KernelTable& active();
/// Pin the dispatch (tests, reproducibility audits). Falls back to scalar
/// if the requested ISA is unavailable; returns the ISA actually selected.
Isa select(Isa wanted);

std::string_view isa_name(Isa isa);

}  // namespace autoheal::kernels
