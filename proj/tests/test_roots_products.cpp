#include <doctest.h>

#include <cmath>

#include "sgl/roots_products.hpp"
#include "sgl/verification.hpp"

using namespace sgl;

TEST_CASE("standard root squares back and follows tau - z") {
    const cplx tau(3.1, 0.0), gamma(0.2, 0.0);
    for (cplx z : {cplx(0.5, 0.3), cplx(7.0, -1.0), cplx(3.1, 2.0)}) {
        const cplx w = standard_root_value(tau, gamma, z);
        CHECK(std::abs(w * w - ((tau - z) * (tau - z) - gamma * gamma / 4.0)) < 1e-13);
    }
    // far away the root approaches tau - z
    const cplx z(200.0, 50.0);
    CHECK(std::abs(standard_root_value(tau, gamma, z) / (tau - z) - 1.0) < 1e-6);
}

TEST_CASE("node products: batch, scalar and removal agree") {
    std::vector<cplx> a;
    const int K = 6;
    for (int k = -K; k <= K; ++k) a.push_back(zero_tau(k) + cplx(0.01 * k, 0.001));
    const NodeProduct P(a, K, false);
    std::vector<cplx> z{cplx(0.7, 0.2), cplx(-2.0, 0.1), cplx(9.0, -0.4)};
    std::vector<cplx> out(z.size());
    P.eval(z.data(), int(z.size()), out.data());
    for (size_t i = 0; i < z.size(); ++i) {
        cplx direct = 1.0;
        for (int k = -K; k <= K; ++k) direct *= (a[k + K] - z[i]) / pi_n(k);
        CHECK(std::abs(P(z[i]) - direct) < 1e-13 * std::abs(direct));
        CHECK(std::abs(out[i] - P(z[i])) < 1e-13 * std::abs(direct));
        CHECK(std::abs(P.without(2, z[i]) * (a[2 + K] - z[i]) / pi_n(2) - direct) < 1e-12 * std::abs(direct));
    }
}

TEST_CASE("zero tail closes the sine product") {
    // prod_{|k| <= L} (s_k - z)/pi_k times the tail equals the full product, independent of L
    for (cplx z : {cplx(1.1, 0.3), cplx(-4.0, 0.5)}) {
        auto full = [&](int L) {
            cplx p = 1.0;
            for (int k = -L; k <= L; ++k) p *= (zero_tau(k) - z) / pi_n(k);
            return p * zero_tail(L, z);
        };
        CHECK(std::abs(full(4) / full(40) - 1.0) < 1e-12);
    }
}

TEST_CASE("canonical root at the zero potential is -i sin omega") {
    const auto t = build_table(Potential::zero(), 4);
    const CanonicalRoots R(t, 16);
    for (cplx l : {cplx(0.7, 0.0), cplx(1.3, 0.2), cplx(5.1, 0.0), cplx(0.05, 0.01)})
        CHECK(std::abs(R.chip(l) + I * std::sin(omega(l))) < 1e-7 * std::max(1.0, std::abs(std::sin(omega(l)))));
    CHECK(std::abs(R.chi1_at_zero() - R.chi2_at_infinity()) < 1e-12);
}

TEST_CASE("oddness and reciprocity of the canonical root") {
    const auto v = Potential::seeded(0);
    const auto t = build_table(v, 6), r = build_table(v.reflected(), 6);
    const CanonicalRoots R(t, 8), Rr(r, 8);
    for (cplx l : product_sample_points()) {
        const cplx a = R.chip(l);
        CHECK(std::abs(R.chip(-l) + a) < 1e-7 * std::abs(a));
        CHECK(std::abs(Rr.chip(-1.0 / (16.0 * l)) - a) < 1e-7 * std::abs(a));
    }
}

TEST_CASE("product representations and constraints on a cosine potential") {
    const auto v = Potential::cosine(0.1);
    const auto t = build_table(v, 16);
    const auto rep = verify_product_reps(v, t, 16, product_sample_points());
    CHECK(rep.max_chi_p < 1e-4);
    CHECK(rep.max_chi_D < 1e-4);
    CHECK(rep.max_delta_dot < 1e-4);
    CHECK(std::abs(rep.constraint_delta_dot - 1.0) < 1e-4);
    CHECK(std::abs(rep.constraint_periodic - 1.0) < 1e-4);
    CHECK(std::abs(rep.constraint_dirichlet - 1.0) < 1e-4);
    // the literal e^{+q(0)} variant misses by e^{2 q(0)} - 1
    CHECK(std::abs(std::abs(rep.constraint_dirichlet_plus - 1.0) - (std::exp(0.2) - 1.0)) < 1e-3);
}

TEST_CASE("sign tables hold on a real potential") {
    const auto t = build_table(Potential::cosine(0.1), 6);
    const CanonicalRoots R(t, 8);
    const auto s = sign_tables(R, 5);
    CHECK(s.checked > 0);
    CHECK(s.ok());
}

TEST_CASE("interpolation reconstructs the node function") {
    const auto t = build_table(Potential::seeded(0), 4);
    CHECK(interpolation_self_test(t, 24, 5, 0) < 1e-5);
    CHECK(interpolation_self_test(t, 8, 5, 1) < 1e-8);
}
