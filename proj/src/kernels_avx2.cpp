#include "sgl/kernels.hpp"

#ifdef SGL_HAVE_AVX2
#include <immintrin.h>
#endif

namespace sgl::kernels::avx2 {

#ifdef SGL_HAVE_AVX2

// Four evaluation points per lane group, split into real and imaginary registers.
void node_product(const cplx* a, const double* inv_d, int K, const cplx* z, int N, cplx* out) {
    int j = 0;
    for (; j + 4 <= N; j += 4) {
        const __m256d zr = _mm256_set_pd(z[j + 3].real(), z[j + 2].real(), z[j + 1].real(), z[j].real());
        const __m256d zi = _mm256_set_pd(z[j + 3].imag(), z[j + 2].imag(), z[j + 1].imag(), z[j].imag());
        __m256d pr = _mm256_set1_pd(1.0), pi_ = _mm256_setzero_pd();
        for (int k = 0; k < K; ++k) {
            const __m256d s = _mm256_set1_pd(inv_d[k]);
            const __m256d fr = _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(a[k].real()), zr), s);
            const __m256d fi = _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(a[k].imag()), zi), s);
            const __m256d nr = _mm256_sub_pd(_mm256_mul_pd(pr, fr), _mm256_mul_pd(pi_, fi));
            const __m256d ni = _mm256_add_pd(_mm256_mul_pd(pr, fi), _mm256_mul_pd(pi_, fr));
            pr = nr;
            pi_ = ni;
        }
        alignas(32) double rr[4], ii[4];
        _mm256_store_pd(rr, pr);
        _mm256_store_pd(ii, pi_);
        for (int t = 0; t < 4; ++t) out[j + t] = {rr[t], ii[t]};
    }
    if (j < N) scalar::node_product(a, inv_d, K, z + j, N - j, out + j);
}

// Four poles a_r per lane group; the sum over j runs in the scalar order.
void cauchy_sum(const cplx* a, int R, const cplx* z, const cplx* c, int N, cplx* out) {
    int r = 0;
    for (; r + 4 <= R; r += 4) {
        const __m256d ar = _mm256_set_pd(a[r + 3].real(), a[r + 2].real(), a[r + 1].real(), a[r].real());
        const __m256d ai = _mm256_set_pd(a[r + 3].imag(), a[r + 2].imag(), a[r + 1].imag(), a[r].imag());
        __m256d sr = _mm256_setzero_pd(), si = _mm256_setzero_pd();
        for (int j = 0; j < N; ++j) {
            const __m256d dr = _mm256_sub_pd(ar, _mm256_set1_pd(z[j].real()));
            const __m256d di = _mm256_sub_pd(ai, _mm256_set1_pd(z[j].imag()));
            const __m256d den = _mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(di, di));
            const __m256d cr = _mm256_set1_pd(c[j].real()), ci = _mm256_set1_pd(c[j].imag());
            const __m256d tr = _mm256_add_pd(_mm256_mul_pd(cr, dr), _mm256_mul_pd(ci, di));
            const __m256d ti = _mm256_sub_pd(_mm256_mul_pd(ci, dr), _mm256_mul_pd(cr, di));
            sr = _mm256_add_pd(sr, _mm256_div_pd(tr, den));
            si = _mm256_add_pd(si, _mm256_div_pd(ti, den));
        }
        alignas(32) double rr[4], ii[4];
        _mm256_store_pd(rr, sr);
        _mm256_store_pd(ii, si);
        for (int t = 0; t < 4; ++t) out[r + t] = {rr[t], ii[t]};
    }
    if (r < R) scalar::cauchy_sum(a + r, R - r, z, c, N, out + r);
}

#else

void node_product(const cplx* a, const double* inv_d, int K, const cplx* z, int N, cplx* out) {
    scalar::node_product(a, inv_d, K, z, N, out);
}
void cauchy_sum(const cplx* a, int R, const cplx* z, const cplx* c, int N, cplx* out) {
    scalar::cauchy_sum(a, R, z, c, N, out);
}

#endif

}  // namespace sgl::kernels::avx2
