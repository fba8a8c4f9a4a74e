#pragma once

#include <cstddef>
#include <string_view>

// Dense kernels behind the path construction. Every kernel has a portable
// scalar reference; vector variants are compiled per-ISA and chosen at
// runtime by cpu feature detection.

namespace bqmc::simd {

enum class Isa { Scalar, Avx2, Avx512 };

std::string_view isa_name(Isa isa);

// Points are processed in panels of this many columns; kernels require nb to
// be a multiple of kPanelAlign.
inline constexpr std::size_t kPanelWidth = 32;
inline constexpr std::size_t kPanelAlign = 16;

// Y[i*nb + p] = sum_{j<cols} A[i*lda + j] * X[j*nb + p]   for i < rows, p < nb.
// X holds one point per column ("dimension-major" panel). Accumulation over j
// runs in increasing order for every (i, p).
using GemmPanelFn = void (*)(const double* A, std::size_t rows, std::size_t cols,
                             std::size_t lda, const double* X, std::size_t nb, double* Y);

namespace scalar {
void gemm_panel(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
                const double* X, std::size_t nb, double* Y);
}
namespace avx2 {
bool compiled();
void gemm_panel(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
                const double* X, std::size_t nb, double* Y);
}
namespace avx512 {
bool compiled();
void gemm_panel(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
                const double* X, std::size_t nb, double* Y);
}

// Best ISA supported by both the build and the running cpu.
Isa detect_isa();

// ISA used by the dispatched entry points. Defaults to detect_isa(), or to the
// value of the BQMC_ISA environment variable (scalar|avx2|avx512) when set and
// supported.
Isa active_isa();

// Overrides the dispatch target; returns false (and changes nothing) if the
// ISA is not available on this machine.
bool set_active_isa(Isa isa);

GemmPanelFn gemm_panel_for(Isa isa);

inline void gemm_panel(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
                       const double* X, std::size_t nb, double* Y) {
    gemm_panel_for(active_isa())(A, rows, cols, lda, X, nb, Y);
}

}  // namespace bqmc::simd
