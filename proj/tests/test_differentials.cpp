#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "sgl/differentials.hpp"

using namespace sgl;

namespace {
DifferentialOptions small_opts(int K) {
    DifferentialOptions o;
    o.K = K;
    return o;
}
}  // namespace

TEST_CASE("zero potential: sigma equals tau without Newton steps") {
    const auto t = build_table(Potential::zero(), 8);
    const CanonicalRoots R(t, 8);
    for (int n : {0, 1, 3}) {
        const auto sol = solve_sigma(R, n, small_opts(8));
        CHECK(sol.newton_iters == 0);
        CHECK(sol.residual_norm < 1e-9);
        for (int k = -8; k <= 8; ++k) {
            CHECK(std::abs(sol.s1(k) - t.tau(1, k)) < 1e-12);
            CHECK(std::abs(sol.s2(k) - t.tau(2, k)) < 1e-12);
        }
    }
}

TEST_CASE("cosine potential: Newton converges and the differentials are normalized") {
    const auto v = Potential::cosine(0.1, 1, 0.05);
    const auto t = build_table(v, 12);
    const CanonicalRoots R(t, 12);
    const auto opt = small_opts(12);
    for (int n : {0, 1}) {
        const auto sol = solve_sigma(R, n, opt);
        CHECK(sol.newton_iters <= 10);
        CHECK(sol.residual_norm < 1e-9);
        const auto rep = verify_normalization(sol, R, 6, opt);
        CHECK(rep.max_deviation < 1e-6);
        CHECK(rep.target_family == 1);
        CHECK(rep.target_index == n);
        const auto gc = gap_confinement(sol, t);
        CHECK(gc.max_violation < 1e-9);
    }
}

TEST_CASE("analytic Jacobian matches central differences") {
    const auto v = Potential::seeded(1);
    const auto t = build_table(v, 8);
    const CanonicalRoots R(t, 8);
    const DifferentialSystem sys(R, 1, small_opts(8));
    Eigen::VectorXcd x = sys.initial();
    for (int i = 0; i < x.size(); ++i) x[i] += cplx(1e-4 * std::sin(i), 0.0);
    CHECK(jacobian_fd_check(sys, x, 40, 7) < 1e-5);
}

TEST_CASE("a sigma pushed out of its gap breaks normalization") {
    const auto v = Potential::seeded(0);
    const auto t = build_table(v, 16);
    const CanonicalRoots R(t, 16);
    const auto opt = small_opts(16);
    auto sol = solve_sigma(R, 1, opt);
    const double before = verify_normalization(sol, R, 6, opt).max_deviation;
    CHECK(before < 1e-6);
    int k = 0;
    double best = 0.0;
    for (int m = -16; m <= 16; ++m)
        if (m != 1 && std::abs(t.gamma(1, m)) > best) best = std::abs(t.gamma(1, m)), k = m;
    sol.sigma1[k + sol.K] = t.lam(1, k, +1) + 0.5 * t.gamma(1, k);
    CHECK(verify_normalization(sol, R, 6, opt).max_deviation > 1e-4);
    CHECK(gap_confinement(sol, t).max_violation > 1e-9);
}

TEST_CASE("inadmissible sigma is an input error") {
    const auto t = build_table(Potential::zero(), 4);
    const CanonicalRoots R(t, 4);
    const DifferentialSystem sys(R, 0, small_opts(4));
    Eigen::VectorXcd x = sys.initial();
    x[0] += 10.0;
    CHECK_THROWS_AS(sys.check_admissible(x), InputError);
}

TEST_CASE("solution JSON carries the sigma lists") {
    const auto t = build_table(Potential::zero(), 4);
    const CanonicalRoots R(t, 4);
    const auto sol = solve_sigma(R, 2, small_opts(4));
    const auto j = nlohmann::json::parse(solution_to_json(sol, 0.0));
    CHECK(j.at("n") == 2);
    CHECK(j.at("sigma1").size() == 9u);
    CHECK(j.at("sigma2").size() == 9u);
    CHECK(j.at("iters") == 0);
}
