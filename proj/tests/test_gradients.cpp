#include <doctest.h>

#include <cmath>

#include "sgl/gradients.hpp"

using namespace sgl;

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
    const auto r = gauss_legendre(3, 8);
    REQUIRE(r.x.size() == 24u);
    for (int deg = 0; deg <= 15; ++deg) {
        double s = 0.0;
        for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], deg);
        CHECK(std::abs(s - 1.0 / (deg + 1)) < 1e-14);
    }
    for (size_t i = 1; i < r.x.size(); ++i) CHECK(r.x[i] > r.x[i - 1]);
}

TEST_CASE("gradient of the discriminant vanishes at the zero potential") {
    for (cplx l : {cplx(0.7, 0.0), cplx(1.3, 0.2), cplx(0.2, -0.05)}) {
        const auto g = grad_discriminant(Potential::zero(), l);
        CHECK(g.max_abs() < 1e-9);
    }
}

TEST_CASE("kernel pairing is linear") {
    const auto v = Potential::cosine(0.1, 1, 0.05);
    const auto g = grad_discriminant(v, cplx(1.3, 0.2));
    const auto dirs = fd_directions(3, 2);
    const auto sum = dirs[0].axpy(2.0, dirs[1]);
    CHECK(std::abs(g.pair(sum) - g.pair(dirs[0]) - 2.0 * g.pair(dirs[1])) < 1e-12 * (1.0 + std::abs(g.pair(sum))));
    const auto h = (cplx(2.0) * g) + g;
    CHECK(std::abs(h.pair(dirs[0]) - 3.0 * g.pair(dirs[0])) < 1e-12 * (1.0 + std::abs(h.pair(dirs[0]))));
}

TEST_CASE("boundary and derivative forms agree on smooth directions") {
    const auto v = Potential::cosine(0.1, 1, 0.05);
    const auto b = grad_monodromy(v, cplx(1.3, 0.2), QForm::Boundary);
    const auto d = grad_monodromy(v, cplx(1.3, 0.2), QForm::Derivative);
    for (const auto& dir : fd_directions(5, 2)) {
        for (int e = 0; e < 4; ++e) {
            const cplx x = b.entry[e].pair(dir), y = d.entry[e].pair(dir);
            CHECK(std::abs(x - y) < 1e-8 * (1.0 + std::abs(x)));
        }
    }
}

TEST_CASE("finite differences confirm the discriminant and Dirichlet gradients") {
    const auto v = Potential::cosine(0.1, 1, 0.05);
    const auto dir = fd_directions(0, 1)[0];
    const cplx lam(1.7, 0.0);
    const auto gD = grad_discriminant(v, lam);
    const auto c1 = fd_check("Delta", 0, 0, gD, v, dir,
                             [&](const Potential& w) { return integrate_fixed(w, lam).Delta; });
    CHECK(c1.pass);
    CHECK(c1.order > 1.9);
    CHECK(c1.rel_err < 1e-5);

    const auto gmu = grad_dirichlet(v, 1);
    const cplx mu0 = locate_dirichlet(v, 1);
    const auto c2 = fd_check("mu", 1, 0, gmu, v, dir,
                             [&](const Potential& w) { return newton_dirichlet(w, mu0); });
    CHECK(c2.pass);
    CHECK(c2.order > 1.9);
}

TEST_CASE("fixed-step monodromy tracks the adaptive integrator") {
    const auto v = Potential::seeded(0);
    for (cplx l : {cplx(0.7, 0.0), cplx(5.1, 0.3)}) {
        const auto a = integrate(v, l, {.tol = 1e-13});
        const auto f = integrate_fixed(v, l);
        CHECK(std::abs(a.Delta - f.Delta) < 1e-9 * (1.0 + std::abs(a.Delta)));
    }
}
