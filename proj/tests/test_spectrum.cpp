#include <doctest.h>

#include <cmath>

#include "sgl/spectrum.hpp"

using namespace sgl;

TEST_CASE("zero potential spectrum is the quadratic root table") {
    const auto t = build_table(Potential::zero(), 8);
    for (int n = -8; n <= 8; ++n) {
        const double s = zero_root(n);
        CHECK(std::abs(t.at(n).minus - s) < 1e-9);
        CHECK(std::abs(t.at(n).plus - s) < 1e-9);
        CHECK(std::abs(t.at(n).mu - s) < 1e-9);
        CHECK(t.at(n).double_root);
        // omega(s) = n pi
        CHECK(std::abs(omega(s) - n * pi) < 1e-12 * std::max(1.0, n * pi));
    }
    CHECK(std::abs(t.lambda_dot_star - cplx(0.0, 0.25)) < 1e-9);
}

TEST_CASE("annulus counts at the zero potential") {
    const auto c = count_annulus(Potential::zero(), 4);
    CHECK(c.periodic == 4 + 8 * 4);
    CHECK(c.dirichlet == 2 + 4 * 4);
    CHECK(c.delta_dot == 4 + 4 * 4);
    CHECK(c.distance < 0.05);
}

// Reference roots from bracketing the independent DOP853 discriminant (q = 0.1 cos 2 pi x, p = 0).
TEST_CASE("cosine potential roots match the oracle") {
    const auto t = build_table(Potential::cosine(0.1), 3);
    const auto& e = t.at(1);
    CHECK(!e.double_root);
    CHECK(std::abs(e.minus.real() - 3.082843695424531) < 1e-10);
    CHECK(std::abs(e.plus.real() - 3.240906420747394) < 1e-10);
    CHECK(std::abs(e.mu.real() - 3.240906420747398) < 1e-10);
    CHECK(std::abs(e.lambda_dot.real() - 3.161862697656782) < 1e-10);
    // n = 0 and n = 2 stay closed for a single mode: max Delta = 1 to rounding in the oracle
    CHECK(t.at(0).double_root);
    CHECK(t.at(2).double_root);
}

TEST_CASE("real potential: real spectrum, interlacing, periodic level") {
    const auto v = Potential::seeded(0);
    const auto t = build_table(v, 4);
    CHECK(t.real);
    for (const auto& e : t.entries) {
        CHECK(std::abs(e.minus.imag()) < 1e-10);
        CHECK(std::abs(e.plus.imag()) < 1e-10);
        CHECK(e.minus.real() <= e.plus.real());
        if (std::abs(e.gamma()) > 1e-9) {
            CHECK(e.minus.real() <= e.mu.real() + 1e-12);
            CHECK(e.mu.real() <= e.plus.real() + 1e-12);
            CHECK(e.minus.real() <= e.lambda_dot.real());
            CHECK(e.lambda_dot.real() <= e.plus.real());
        }
        const double target = (e.n % 2 == 0) ? 1.0 : -1.0;
        for (cplx l : {e.minus, e.plus}) CHECK(std::abs(spectral_sample(v, l, 1e-12).Delta - target) < 1e-7);
        // contour trace formula agrees with the located roots
        CHECK(std::abs(e.trace_tau - e.tau()) < 1e-8 * std::max(1.0, std::abs(e.tau())));
    }
}

TEST_CASE("reciprocity of the three spectra") {
    const auto v = Potential::seeded(1);
    const auto t = build_table(v, 4), r = build_table(v.reflected(), 4);
    const auto rep = reciprocity(t, r, 4);
    CHECK(rep.periodic < 1e-9);
    CHECK(rep.dirichlet < 1e-9);
    CHECK(rep.delta_dot < 1e-9);
    CHECK(rep.delta_dot_star < 1e-9);
}

TEST_CASE("two-index views and tails") {
    const auto t = build_table(Potential::seeded(2), 4);
    for (int k = 0; k <= 4; ++k) {
        // family 2 in the mu plane: lambda_{2,k}^+ = 1/(16 lambda_{-k}^-)
        CHECK(std::abs(t.lam(2, k, +1) - 1.0 / (16.0 * t.at(-k).minus)) < 1e-14);
    }
    CHECK(t.lam(1, 3, +1) == t.at(3).plus);
    // beyond the table: zero-potential value plus fitted shift / k
    const cplx c = t.tail_shift(1, SpectrumTable::Node::Tau);
    CHECK(std::abs(t.tau(1, 9) - (zero_tau(9) + c / 9.0)) < 1e-15);
    CHECK(std::abs(t.gamma(1, 9)) == 0.0);
}

TEST_CASE("spectrum JSON round trip is exact") {
    const auto t = build_table(Potential::cosine(0.1, 1, 0.05), 2);
    const auto u = table_from_json(table_to_json(t));
    REQUIRE(u.N_max == t.N_max);
    for (int n = -2; n <= 2; ++n) {
        CHECK(u.at(n).minus == t.at(n).minus);
        CHECK(u.at(n).plus == t.at(n).plus);
        CHECK(u.at(n).mu == t.at(n).mu);
        CHECK(u.at(n).lambda_dot == t.at(n).lambda_dot);
        CHECK(u.at(n).double_root == t.at(n).double_root);
    }
    CHECK(u.lambda_dot_star == t.lambda_dot_star);
    CHECK_THROWS_AS(table_from_json("{\"N_max\": 1, \"lambda\": []}"), InputError);
    CHECK_THROWS_AS(table_from_json("{\"N_max\": 1,,}"), InputError);
}

TEST_CASE("isolating neighborhoods separate the stored roots") {
    const auto t = build_table(Potential::seeded(0), 4);
    const auto iso = build_isolating(t);
    CHECK(iso.failure.empty());
    CHECK(iso.c > 0.0);
    for (int n = -4; n <= 4; ++n) {
        const auto& d = iso.at(n);
        for (cplx z : {t.at(n).minus, t.at(n).plus, t.at(n).mu, t.at(n).lambda_dot})
            CHECK(std::abs(z - d.center) < d.radius);
    }
}

TEST_CASE("disc geometry") {
    CHECK(DiscFamily::center(0) == cplx(0.25));
    CHECK(std::abs(DiscFamily::center(3) - 3.0 * pi) < 1e-15);
    CHECK(DiscFamily::radius(2) == doctest::Approx(pi / 3));
    // discs of distinct indices are disjoint
    for (int m = -5; m <= 5; ++m)
        for (int n = m + 1; n <= 5; ++n) CHECK(DiscFamily::distance(m, n) > 0.0);
}
