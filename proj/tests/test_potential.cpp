#include <doctest.h>

#include <cmath>
#include <string>

#include "sgl/potential.hpp"
#include "sgl/types.hpp"

using namespace sgl;

TEST_CASE("cosine potential evaluates pointwise") {
    const auto v = Potential::cosine(0.1, 1, 0.05);
    CHECK(std::abs(v.q(0.0) - 0.1) < 1e-15);
    CHECK(std::abs(v.q(0.25)) < 1e-15);
    CHECK(std::abs(v.p(0.5) + 0.05) < 1e-15);
    // q_x = -0.2 pi sin(2 pi x)
    CHECK(std::abs(v.qx(0.25) + 0.2 * pi) < 1e-14);
    // P cos = sqrt(1 + 4 pi^2) cos
    CHECK(std::abs(v.Pp(0.0) - 0.05 * P_symbol(1)) < 1e-14);
}

TEST_CASE("reflection flips q and keeps p") {
    const auto v = Potential::seeded(7);
    const auto r = v.reflected();
    for (double x : {0.0, 0.13, 0.5, 0.91}) {
        CHECK(std::abs(r.q(x) + v.q(x)) < 1e-15);
        CHECK(std::abs(r.p(x) - v.p(x)) < 1e-15);
    }
}

TEST_CASE("seeded potentials are real, small and reproducible") {
    const auto a = Potential::seeded(0), b = Potential::seeded(0), c = Potential::seeded(1);
    CHECK(a.real());
    CHECK(a.Kf() == 3);
    bool differs = false;
    for (int k = -3; k <= 3; ++k) {
        CHECK(a.q_coeff(k) == b.q_coeff(k));
        CHECK(a.p_coeff(k) == b.p_coeff(k));
        // real functions: conjugate-symmetric coefficients
        CHECK(std::abs(a.q_coeff(-k) - std::conj(a.q_coeff(k))) < 1e-16);
        differs = differs || a.q_coeff(k) != c.q_coeff(k);
    }
    CHECK(differs);
    for (int i = 0; i < 32; ++i) {
        const double x = i / 32.0;
        CHECK(std::abs(a.q(x).imag()) < 1e-15);
        // sum over k of 0.075/k bounds |q|
        CHECK(std::abs(a.q(x)) < 0.075 * (1.0 + 0.5 + 1.0 / 3.0));
    }
}

TEST_CASE("axpy merges bands") {
    const auto v = Potential::cosine(0.1);
    const auto d = Potential::random_direction(5, 4);
    const auto w = v.axpy(0.5, d);
    CHECK(w.Kf() == 4);
    for (double x : {0.1, 0.7}) CHECK(std::abs(w.q(x) - v.q(x) - 0.5 * d.q(x)) < 1e-15);
}

TEST_CASE("potential JSON round trip") {
    const auto v = Potential::seeded(2);
    const auto w = potential_from_json(potential_to_json(v));
    CHECK(w.Kf() == v.Kf());
    CHECK(w.real() == v.real());
    for (int k = -v.Kf(); k <= v.Kf(); ++k) {
        CHECK(w.q_coeff(k) == v.q_coeff(k));
        CHECK(w.p_coeff(k) == v.p_coeff(k));
    }
}

TEST_CASE("potential JSON errors carry line and column") {
    const std::string bad = "{\"real\": true, \"Kf\": 1,\n  \"q\": [[0.05,0],[0,0] [0.05,0]], \"p\": []}";
    try {
        potential_from_json(bad);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 2, column 24") != std::string::npos);
    }
    CHECK_THROWS_AS(potential_from_json("{\"real\": true}"), InputError);
    CHECK_THROWS_AS(load_potential("/nonexistent/potential.json"), InputError);
}
