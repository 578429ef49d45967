#include <doctest.h>

#include <cmath>

#include "sgl/monodromy.hpp"
#include "sgl/potential.hpp"

using namespace sgl;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }
}  // namespace

TEST_CASE("zero potential matches the closed forms") {
    const auto v = Potential::zero();
    IntegratorOptions io;
    io.tol = 1e-11;
    for (cplx l : {cplx(0.3, 0.0), cplx(2.0, 0.5), cplx(-1.1, 0.2), cplx(0.04, -0.01), cplx(9.5, 0.0)}) {
        const auto r = integrate(v, l, io);
        const cplx w = omega(l);
        CHECK(rel(r.Delta, std::cos(w)) < 1e-8);
        CHECK(rel(r.chi_D(), std::sin(w)) < 1e-8);
        CHECK(rel(r.Delta_dot, -(1.0 + 1.0 / (16.0 * l * l)) * std::sin(w)) < 1e-8);
        const auto c = closed_form_zero(l);
        CHECK(max_abs(r.M - c.M) < 1e-8);
    }
}

TEST_CASE("Wronskian stays 1") {
    const auto v = Potential::seeded(4);
    for (cplx l : {cplx(1.3, 0.2), cplx(0.05, 0.03), cplx(-6.0, 1.0)}) {
        const auto r = integrate(v, l);
        CHECK(std::abs(r.M.det() - 1.0) < 1e-10);
    }
}

// Reference values from an independent DOP853 integration (rtol 1e-13) of the same ODE.
TEST_CASE("monodromy matches the independent oracle") {
    const auto v = Potential::cosine(0.1, 1, 0.05);
    IntegratorOptions io;
    io.tol = 1e-12;
    {
        const auto r = integrate(v, {1.3, 0.2}, io);
        CHECK(rel(r.Delta, {3.180543652775050e-01, -1.986008926408088e-01}) < 1e-10);
        CHECK(rel(r.delta, {-1.126627013681938e-02, -3.400974280242039e-03}) < 1e-10);
        CHECK(rel(r.Delta_dot, {-1.006258529469521e+00, -5.705529066859816e-02}) < 1e-10);
        CHECK(rel(r.M.b, {1.030311539202116e+00, 7.294070682347951e-02}) < 1e-10);
        CHECK(rel(r.M.c, {-9.148920290484497e-01, -5.791988224748804e-02}) < 1e-10);
    }
    {
        const auto r = integrate(v, {0.2, -0.05}, io);
        CHECK(rel(r.Delta, {1.003184961649478e+00, -1.165734138853229e-02}) < 1e-10);
        CHECK(rel(r.delta, {5.138508529700658e-05, -1.877668703390593e-04}) < 1e-10);
        CHECK(rel(r.Delta_dot, {1.324587848530079e-01, 3.493747659832514e-01}) < 1e-10);
        CHECK(rel(r.M.b, {-9.965192798806724e-02, -1.296603035191381e-01}) < 1e-10);
    }
    {
        const auto r = integrate(Potential::cosine(0.1), 4.0, io);
        CHECK(rel(r.Delta, -6.685228441971760e-01) < 1e-10);
        CHECK(rel(r.Delta_dot, 7.499936488714487e-01) < 1e-10);
        CHECK(rel(r.M.b, -6.840859183098563e-01) < 1e-10);
    }
}

TEST_CASE("reflection identities of the monodromy") {
    // Delta(lambda, q, p) = Delta(-1/(16 lambda), -q, p), chi_D(lambda, q, p) = e^{q(0)} chi_D(-1/(16 lambda), -q, p)
    for (std::uint64_t s : {1u, 3u}) {
        const auto v = Potential::seeded(s), r = v.reflected();
        for (cplx l : {cplx(1.3, 0.2), cplx(0.07, -0.02), cplx(-2.2, 0.4)}) {
            const auto a = integrate(v, l), b = integrate(r, -1.0 / (16.0 * l));
            CHECK(rel(a.Delta, b.Delta) < 1e-10);
            CHECK(rel(a.chi_D(), std::exp(v.q(0.0)) * b.chi_D()) < 1e-10);
        }
    }
}

TEST_CASE("second lambda derivative agrees with differences of the first") {
    const auto v = Potential::seeded(0);
    IntegratorOptions io;
    io.second_derivative = true;
    const cplx l(1.7, 0.1);
    const double h = 1e-5;
    const auto r = integrate(v, l, io);
    const cplx fd = (integrate(v, l + h).Delta_dot - integrate(v, l - h).Delta_dot) / (2.0 * h);
    CHECK(rel(r.Delta_ddot, fd) < 1e-7);
}

TEST_CASE("fixed-step integration agrees with the adaptive one") {
    IntegratorOptions io;
    io.fixed_steps = 4000;
    const auto v = Potential::seeded(1);
    const auto a = integrate(v, {2.5, 0.3}, io), b = integrate(v, {2.5, 0.3});
    CHECK(max_abs(a.M - b.M) < 1e-10);
}
