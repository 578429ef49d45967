#include <atomic>

#include "sgl/kernels.hpp"

namespace sgl::kernels {

namespace scalar {

void node_product(const cplx* a, const double* inv_d, int K, const cplx* z, int N, cplx* out) {
    for (int j = 0; j < N; ++j) {
        double pr = 1.0, pi_ = 0.0;
        const double zr = z[j].real(), zi = z[j].imag();
        for (int k = 0; k < K; ++k) {
            const double fr = (a[k].real() - zr) * inv_d[k];
            const double fi = (a[k].imag() - zi) * inv_d[k];
            const double nr = pr * fr - pi_ * fi;
            const double ni = pr * fi + pi_ * fr;
            pr = nr;
            pi_ = ni;
        }
        out[j] = {pr, pi_};
    }
}

void cauchy_sum(const cplx* a, int R, const cplx* z, const cplx* c, int N, cplx* out) {
    for (int r = 0; r < R; ++r) {
        double sr = 0.0, si = 0.0;
        for (int j = 0; j < N; ++j) {
            const double dr = a[r].real() - z[j].real();
            const double di = a[r].imag() - z[j].imag();
            const double den = dr * dr + di * di;
            const double cr = c[j].real(), ci = c[j].imag();
            // c / d = c * conj(d) / |d|^2
            sr += (cr * dr + ci * di) / den;
            si += (ci * dr - cr * di) / den;
        }
        out[r] = {sr, si};
    }
}

}  // namespace scalar

namespace {
std::atomic<int> forced{-1};

Isa detect() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
    return Isa::Scalar;
}
}  // namespace

bool avx2_available() {
    static const bool ok = detect() == Isa::Avx2;
    return ok;
}

Isa active_isa() {
    const int f = forced.load();
    if (f >= 0) return Isa(f);
    return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

void force_isa(Isa isa) {
    if (isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
    forced.store(int(isa));
}

std::string isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void node_product(const cplx* a, const double* inv_d, int K, const cplx* z, int N, cplx* out) {
#ifdef SGL_HAVE_AVX2
    if (active_isa() == Isa::Avx2) return avx2::node_product(a, inv_d, K, z, N, out);
#endif
    scalar::node_product(a, inv_d, K, z, N, out);
}

void cauchy_sum(const cplx* a, int R, const cplx* z, const cplx* c, int N, cplx* out) {
#ifdef SGL_HAVE_AVX2
    if (active_isa() == Isa::Avx2) return avx2::cauchy_sum(a, R, z, c, N, out);
#endif
    scalar::cauchy_sum(a, R, z, c, N, out);
}

}  // namespace sgl::kernels
