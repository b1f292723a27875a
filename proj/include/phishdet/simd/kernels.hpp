#pragma once

// Dense double-precision kernels used by the classifiers. Each kernel has a
// scalar reference implementation and, on x86-64, an AVX2/FMA variant. The
// variant is picked once at startup from CPUID and may be overridden (tests
// use this to compare the two paths).
//
// All matrices are row-major and contiguous. The gemm kernels accumulate into
// C; callers zero or pre-fill C themselves.

#include <cstddef>
#include <span>
#include <string_view>

namespace phishdet::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C[m x n] += A[m x k] * B[k x n]
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                  std::size_t n);
  // C[k x n] += A^T * B, with A[m x k] and B[m x n]
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                  std::size_t n);
  // C[m x k] += A * B^T, with A[m x n] and B[k x n]
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                  std::size_t n);
};

bool isa_supported(Isa isa) noexcept;

// Best ISA the running CPU supports.
Isa detect_isa() noexcept;

// Table for a specific ISA. Throws std::invalid_argument when the CPU (or the
// build) cannot run it.
const KernelTable& table(Isa isa);

// Table used by the free functions below.
const KernelTable& active();
Isa active_isa() noexcept;
void set_active_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

// Scoped ISA override, restores the previous choice on destruction.
class IsaOverride {
 public:
  explicit IsaOverride(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~IsaOverride() { set_active_isa(previous_); }
  IsaOverride(const IsaOverride&) = delete;
  IsaOverride& operator=(const IsaOverride&) = delete;

 private:
  Isa previous_;
};

namespace detail {
extern const KernelTable scalar_table;
#if defined(PHISHDET_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace phishdet::simd
