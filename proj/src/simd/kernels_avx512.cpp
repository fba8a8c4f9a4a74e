#include "bqmc/simd/kernels.hpp"

#if defined(BQMC_HAVE_AVX512)
#include <immintrin.h>
#endif

namespace bqmc::simd::avx512 {

#if defined(BQMC_HAVE_AVX512)

bool compiled() { return true; }

namespace {

// 6 rows x 16 points: 12 zmm accumulators.
template <std::size_t R>
inline void block(const double* A, std::size_t cols, std::size_t lda, const double* X,
                  std::size_t nb, std::size_t p0, double* Y) {
    __m512d acc[R][2];
    for (std::size_t r = 0; r < R; ++r) acc[r][0] = acc[r][1] = _mm512_setzero_pd();
    const double* x = X + p0;
    for (std::size_t j = 0; j < cols; ++j, x += nb) {
        const __m512d x0 = _mm512_loadu_pd(x);
        const __m512d x1 = _mm512_loadu_pd(x + 8);
        for (std::size_t r = 0; r < R; ++r) {
            const __m512d a = _mm512_set1_pd(A[r * lda + j]);
            acc[r][0] = _mm512_fmadd_pd(a, x0, acc[r][0]);
            acc[r][1] = _mm512_fmadd_pd(a, x1, acc[r][1]);
        }
    }
    for (std::size_t r = 0; r < R; ++r) {
        _mm512_storeu_pd(Y + r * nb + p0, acc[r][0]);
        _mm512_storeu_pd(Y + r * nb + p0 + 8, acc[r][1]);
    }
}

template <std::size_t R>
inline void row_block(const double* A, std::size_t cols, std::size_t lda, const double* X,
                      std::size_t nb, double* Y) {
    for (std::size_t p0 = 0; p0 < nb; p0 += 16) block<R>(A, cols, lda, X, nb, p0, Y);
}

}  // namespace

void gemm_panel(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
                const double* X, std::size_t nb, double* Y) {
    std::size_t i = 0;
    for (; i + 6 <= rows; i += 6) row_block<6>(A + i * lda, cols, lda, X, nb, Y + i * nb);
    for (; i < rows; ++i) row_block<1>(A + i * lda, cols, lda, X, nb, Y + i * nb);
}

#else

bool compiled() { return false; }

void gemm_panel(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
                const double* X, std::size_t nb, double* Y) {
    scalar::gemm_panel(A, rows, cols, lda, X, nb, Y);
}

#endif

}  // namespace bqmc::simd::avx512
