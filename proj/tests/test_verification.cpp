#include <doctest.h>

#include <algorithm>

#include "sgl/verification.hpp"

using namespace sgl;

TEST_CASE("config: defaults validate and JSON round trips") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.N_max = 10;
    c.K = 12;
    c.seed = 5;
    const auto back = config_from_json(config_to_json(c));
    CHECK(back.N_max == 10);
    CHECK(back.K == 12);
    CHECK(back.seed == 5u);
    CHECK(back.thresholds == c.thresholds);
}

TEST_CASE("config: bad values and keys are input errors") {
    RunConfig c;
    c.K = 4;
    c.N_max = 8;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.newton_tol = -1.0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.format = "xml";
    CHECK_THROWS_AS(c.validate(), InputError);
    CHECK_THROWS_AS(config_from_json(R"({"bogus": 1})"), InputError);
    try {
        config_from_json("{\n  \"K\": ,\n}");
        FAIL("no throw");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("every check has a threshold") {
    const auto th = default_thresholds();
    for (const char* id : {"products.chi_p", "roots.oddness", "differentials.normalization",
                           "gradients.fd_rel_err", "interpolation.self_test", "monodromy.zero_closed_form"})
        CHECK(th.count(id) == 1);
    RunConfig c;
    CHECK(c.threshold("products.chi_p") == 1e-4);
    CHECK_THROWS(c.threshold("nope"));
}

TEST_CASE("suite is deterministic and sorted") {
    RunConfig c;
    c.N_max = 6;
    c.K = 6;
    c.product_K = {4, 6};
    c.sigma_n = {0};
    c.normalization_mmax = 4;
    c.reciprocity_nmax = 3;
    c.counting_N = 2;
    c.interpolation_K = 8;
    SuiteOptions opt;
    opt.gradients = false;
    const auto a = run_suite(Potential::seeded(0), c, opt);
    const auto b = run_suite(Potential::seeded(0), c, opt);
    CHECK(reports_to_json(a) == reports_to_json(b));
    CHECK(std::is_sorted(a.begin(), a.end(),
                         [](const CheckReport& x, const CheckReport& y) { return x.check_id < y.check_id; }));
    const auto csv = reports_to_csv(a);
    CHECK(csv.find("check_id") != std::string::npos);
}

TEST_CASE("zero potential runs the closed-form checks") {
    RunConfig c;
    c.N_max = 4;
    c.K = 4;
    c.product_K = {4};
    c.sigma_n = {0};
    c.normalization_mmax = 3;
    c.reciprocity_nmax = 2;
    c.counting_N = 2;
    c.interpolation_K = 6;
    SuiteOptions opt;
    opt.gradients = false;
    const auto r = run_suite(Potential::zero(), c, opt);
    auto find = [&](const std::string& id) {
        return std::find_if(r.begin(), r.end(), [&](const CheckReport& x) { return x.check_id == id; });
    };
    REQUIRE(find("monodromy.zero_closed_form") != r.end());
    CHECK(find("monodromy.zero_closed_form")->status == CheckStatus::Pass);
    CHECK(find("spectrum.zero_closed_form")->status == CheckStatus::Pass);
    CHECK(find("differentials.residual")->status == CheckStatus::Pass);
}
