#include "autoheal/kernels.hpp"

#include <atomic>

namespace autoheal::kernels {

#if !defined(AUTOHEAL_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(AUTOHEAL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* detect() {
  if (cpu_has_avx2()) return avx2_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

Isa select(Isa wanted) {
  const KernelTable* t = &scalar_table();
  if (wanted == Isa::Avx2 && cpu_has_avx2()) t = avx2_table();
  slot().store(t, std::memory_order_release);
  return t->isa;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace autoheal::kernels
