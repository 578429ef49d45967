// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <thread>
#include <vector>

#include "sgl/verification.hpp"

using namespace sgl;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++failures;
}

const CheckReport* find(const std::vector<CheckReport>& r, const std::string& id) {
    for (const auto& x : r)
        if (x.check_id == id) return &x;
    return nullptr;
}

// All listed checks must have run and passed.
bool passed(const std::vector<CheckReport>& r, std::initializer_list<const char*> ids, std::string& detail) {
    bool ok = true;
    for (const char* id : ids) {
        const auto* x = find(r, id);
        char buf[160];
        if (!x) {
            std::snprintf(buf, sizeof buf, "%s=missing ", id);
            ok = false;
        } else {
            std::snprintf(buf, sizeof buf, "%s=%.3g(%s) ", id, x->metric, status_name(x->status));
            ok = ok && x->status == CheckStatus::Pass;
        }
        detail += buf;
    }
    return ok;
}

bool any_failed(const std::vector<CheckReport>& r, std::initializer_list<const char*> ids, std::string& detail) {
    bool bad = false;
    for (const char* id : ids) {
        const auto* x = find(r, id);
        if (x && x->status == CheckStatus::Fail) {
            bad = true;
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s=%.3g(fail) ", id, x->metric);
            detail += buf;
        }
    }
    return bad;
}

}  // namespace

int main() {
    RunConfig cfg;
    cfg.threads = int(std::max(1u, std::thread::hardware_concurrency()));

    // 1: closed forms at v = 0 on 20 points, integrator tol 1e-11, timed
    {
        const auto t0 = std::chrono::steady_clock::now();
        IntegratorOptions io;
        io.tol = 1e-11;
        double m = 0.0;
        for (int i = 0; i < 20; ++i) {
            const cplx l = i < 10 ? cplx(0.05 + 0.9 * i, 0.0) : cplx(-3.0 + 0.8 * (i - 10), 0.05 + 0.1 * (i - 10));
            const auto r = integrate(Potential::zero(), l, io);
            const cplx w = omega(l);
            auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
            m = std::max({m, rel(r.Delta, std::cos(w)), rel(r.chi_D(), std::sin(w)),
                          rel(r.Delta_dot, -(1.0 + 1.0 / (16.0 * l * l)) * std::sin(w))});
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[128];
        std::snprintf(buf, sizeof buf, "max rel err %.3g (<= 1e-8), %.3f s (< 5 s)", m, secs);
        report(1, m <= 1e-8 && secs < 5.0, buf);
    }

    SuiteOptions no_fd;
    no_fd.gradients = false;
    const auto zero = run_suite(Potential::zero(), cfg, no_fd);
    const auto seeded = run_suite(Potential::seeded(cfg.seed), cfg);
    SuiteOptions bad = no_fd;
    bad.corrupt = Corruption{};
    const auto corrupted = run_suite(Potential::seeded(cfg.seed), cfg, bad);

    std::string d;
    {
        d.clear();
        const bool ok = passed(zero, {"spectrum.zero_closed_form", "counting.annulus"}, d);
        report(2, ok && cfg.N_max >= 8 && cfg.counting_N == 4, d);
    }
    d.clear();
    report(3, passed(seeded, {"reciprocity.periodic", "reciprocity.dirichlet", "reciprocity.delta_dot"}, d), d);
    d.clear();
    report(4, passed(seeded, {"spectrum.real", "spectrum.interlace", "spectrum.periodic_level"}, d), d);
    d.clear();
    report(5,
           passed(seeded, {"products.chi_p", "products.chi_D", "products.delta_dot", "products.monotone",
                           "constraints.delta_dot", "constraints.dirichlet", "constraints.periodic"},
                  d),
           d);
    d.clear();
    {
        bool ok = passed(zero, {"roots.zero_closed_form"}, d);
        ok = passed(seeded, {"roots.oddness", "roots.reciprocity", "roots.sign_tables"}, d) && ok;
        report(6, ok, d);
    }
    d.clear();
    {
        bool ok = passed(zero, {"gradients.zero_discriminant"}, d);
        ok = passed(seeded, {"gradients.fd_rel_err", "gradients.fd_order_deficit"}, d) && ok;
        report(7, ok, d);
    }
    d.clear();
    report(8,
           passed(seeded, {"differentials.newton_iterations", "differentials.residual", "differentials.normalization",
                           "differentials.gap_confinement", "differentials.root_estimate",
                           "differentials.normalization_negative"},
                  d),
           d);

    // 9: sigma = tau at v = 0 with no Newton step
    {
        const auto t = build_table(Potential::zero(), cfg.N_max, cfg.spectrum_options());
        const CanonicalRoots R(t, cfg.K);
        int iters = 0;
        double res = 0.0, off = 0.0;
        for (int n : cfg.sigma_n) {
            const auto s = solve_sigma(R, n, cfg.differential_options());
            iters = std::max(iters, s.newton_iters);
            res = std::max(res, s.residual_norm);
            for (int k = -s.K; k <= s.K; ++k)
                off = std::max({off, std::abs(s.s1(k) - t.tau(1, k)), std::abs(s.s2(k) - t.tau(2, k))});
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, "newton steps %d, residual %.3g (<= 1e-9), max |sigma - tau| %.3g", iters, res,
                      off);
        report(9, iters == 0 && res <= 1e-9 && off <= 1e-12, buf);
    }
    d.clear();
    report(10, passed(seeded, {"interpolation.self_test"}, d) && cfg.interpolation_K == 24 &&
                   cfg.interpolation_points == 5,
           d);
    d.clear();
    {
        const bool broke = any_failed(corrupted,
                                      {"differentials.normalization", "differentials.gap_confinement",
                                       "differentials.root_estimate"},
                                      d);
        report(11, broke, "criterion 8 checks on the corrupted solution: " + d);
    }

    std::printf("%s\n", failures == 0 ? "ALL PASS" : "SOME CRITERIA FAILED");
    return failures == 0 ? 0 : 1;
}
