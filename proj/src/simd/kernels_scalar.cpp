#include "bqmc/simd/kernels.hpp"

namespace bqmc::simd::scalar {

void gemm_panel(const double* A, std::size_t rows, std::size_t cols, std::size_t lda,
                const double* X, std::size_t nb, double* Y) {
    for (std::size_t i = 0; i < rows; ++i) {
        double* y = Y + i * nb;
        for (std::size_t p = 0; p < nb; ++p) y[p] = 0.0;
        const double* a = A + i * lda;
        for (std::size_t j = 0; j < cols; ++j) {
            const double aij = a[j];
            const double* x = X + j * nb;
            for (std::size_t p = 0; p < nb; ++p) y[p] += aij * x[p];
        }
    }
}

}  // namespace bqmc::simd::scalar
