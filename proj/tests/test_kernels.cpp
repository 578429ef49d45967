#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "sgl/kernels.hpp"

using namespace sgl;

namespace {
std::vector<cplx> random_c(std::mt19937_64& g, int n, double scale) {
    std::uniform_real_distribution<double> U(-scale, scale);
    std::vector<cplx> v(n);
    for (auto& z : v) z = {U(g), U(g)};
    return v;
}
bool bitwise_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}
}  // namespace

TEST_CASE("node product: AVX2 equals scalar bit for bit") {
    if (!kernels::avx2_available()) {
        MESSAGE("AVX2 not available, skipping");
        return;
    }
    std::mt19937_64 g(11);
    for (int K : {0, 1, 5, 16, 33}) {
        const int M = 2 * K + 1;
        for (int N : {1, 3, 4, 7, 64, 65}) {
            const auto a = random_c(g, M, 10.0);
            std::vector<double> inv_d(M);
            for (int k = -K; k <= K; ++k) inv_d[k + K] = 1.0 / pi_n(k);
            const auto z = random_c(g, N, 10.0);
            std::vector<cplx> s(N), v(N);
            kernels::scalar::node_product(a.data(), inv_d.data(), M, z.data(), N, s.data());
            kernels::avx2::node_product(a.data(), inv_d.data(), M, z.data(), N, v.data());
            CHECK(bitwise_equal(s, v));
        }
    }
}

TEST_CASE("Cauchy sum: AVX2 equals scalar bit for bit") {
    if (!kernels::avx2_available()) {
        MESSAGE("AVX2 not available, skipping");
        return;
    }
    std::mt19937_64 g(12);
    for (int R : {1, 2, 9, 33}) {
        for (int N : {1, 2, 5, 64, 129}) {
            const auto a = random_c(g, R, 5.0);
            const auto z = random_c(g, N, 1.0);
            const auto c = random_c(g, N, 1.0);
            std::vector<cplx> s(R), v(R);
            kernels::scalar::cauchy_sum(a.data(), R, z.data(), c.data(), N, s.data());
            kernels::avx2::cauchy_sum(a.data(), R, z.data(), c.data(), N, v.data());
            CHECK(bitwise_equal(s, v));
        }
    }
}

TEST_CASE("scalar kernels match the definitions") {
    std::mt19937_64 g(13);
    const int M = 9, N = 5;
    const auto a = random_c(g, M, 3.0);
    std::vector<double> inv_d(M, 0.5);
    const auto z = random_c(g, N, 3.0);
    std::vector<cplx> out(N);
    kernels::scalar::node_product(a.data(), inv_d.data(), M, z.data(), N, out.data());
    for (int j = 0; j < N; ++j) {
        cplx p = 1.0;
        for (int k = 0; k < M; ++k) p *= (a[k] - z[j]) * 0.5;
        CHECK(std::abs(out[j] - p) <= 1e-14 * std::abs(p));
    }
    const auto c = random_c(g, N, 1.0);
    std::vector<cplx> cs(M);
    kernels::scalar::cauchy_sum(a.data(), M, z.data(), c.data(), N, cs.data());
    for (int r = 0; r < M; ++r) {
        cplx s = 0.0;
        for (int j = 0; j < N; ++j) s += c[j] / (a[r] - z[j]);
        CHECK(std::abs(cs[r] - s) <= 1e-13 * std::max(1.0, std::abs(s)));
    }
}

TEST_CASE("dispatch can be forced") {
    const auto before = kernels::active_isa();
    kernels::force_isa(kernels::Isa::Scalar);
    CHECK(kernels::active_isa() == kernels::Isa::Scalar);
    kernels::force_isa(kernels::Isa::Avx2);
    CHECK(kernels::active_isa() == (kernels::avx2_available() ? kernels::Isa::Avx2 : kernels::Isa::Scalar));
    kernels::force_isa(before);
    CHECK(kernels::isa_name(kernels::Isa::Scalar) == "scalar");
}
