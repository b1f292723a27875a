#include <atomic>
#include <stdexcept>
#include <string>

#include "phishdet/simd/kernels.hpp"

namespace phishdet::simd {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(PHISHDET_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() noexcept { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("instruction set not available: " + std::string(to_string(isa)));
  }
#if defined(PHISHDET_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

namespace {
std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{&table(detect_isa())};
  return ptr;
}
}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Isa active_isa() noexcept { return current().load(std::memory_order_acquire)->isa; }

void set_active_isa(Isa isa) { current().store(&table(isa), std::memory_order_release); }

}  // namespace phishdet::simd
