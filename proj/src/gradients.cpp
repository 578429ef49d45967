#include "sgl/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace sgl {

cplx GradientKernel::pair(const Potential& dir) const {
    cplx s = ev0 * dir.q(0.0);
    for (size_t i = 0; i < x.size(); ++i) {
        cplx t = 0.0;
        if (!q.empty()) t += q[i] * dir.q(x[i]);
        if (!qx.empty()) t += qx[i] * dir.qx(x[i]);
        if (!p.empty()) t += p[i] * dir.Pp(x[i]);
        s += w[i] * t;
    }
    return s;
}

double GradientKernel::max_abs() const {
    double m = std::abs(ev0);
    for (const auto* part : {&q, &qx, &p})
        for (const cplx c : *part) m = std::max(m, std::abs(c));
    return m;
}

double GradientKernel::l2_norm() const {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!q.empty()) s += w[i] * std::norm(q[i]);
        if (!p.empty()) s += w[i] * std::norm(p[i]);
    }
    return std::sqrt(s);
}

cplx GradientKernel::project_q_cos(int n) const {
    cplx s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * q[i] * std::cos(2.0 * pi * n * x[i]);
    return s;
}

namespace {

std::vector<cplx> add_parts(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<cplx> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

GradientKernel empty_like(const LineRule& rule) {
    GradientKernel k;
    k.x = rule.x;
    k.w = rule.w;
    return k;
}

}  // namespace

GradientKernel operator+(const GradientKernel& a, const GradientKernel& b) {
    if (a.x != b.x) throw InputError("kernels live on different grids");
    GradientKernel r = a;
    r.q = add_parts(a.q, b.q);
    r.qx = add_parts(a.qx, b.qx);
    r.p = add_parts(a.p, b.p);
    r.ev0 = a.ev0 + b.ev0;
    return r;
}

GradientKernel operator*(cplx s, const GradientKernel& a) {
    GradientKernel r = a;
    for (auto* part : {&r.q, &r.qx, &r.p})
        for (cplx& c : *part) c *= s;
    r.ev0 *= s;
    return r;
}

LineRule kernel_grid(cplx lambda) {
    const double f = std::abs(lambda) + 1.0 / (16.0 * std::abs(lambda));
    return gauss_legendre(16 + int(std::ceil(f)), 12);
}

PathSample sample_path(const Potential& v, cplx lambda, double tol) {
    PathSample ps;
    ps.rule = kernel_grid(lambda);
    IntegratorOptions o;
    o.tol = tol;
    o.record_x = &ps.rule.x;
    ps.mono = integrate(v, lambda, o);
    if (ps.mono.path.size() != ps.rule.x.size()) throw NumericalError("path recording incomplete");
    ps.M = ps.mono.path;
    ps.eq.resize(ps.M.size());
    ps.emq.resize(ps.M.size());
    for (size_t i = 0; i < ps.M.size(); ++i) {
        cplx a;
        v.lax().eval(ps.rule.x[i], a, ps.eq[i], ps.emq[i]);
    }
    return ps;
}

MonodromyGradient grad_monodromy(const PathSample& ps, QForm form) {
    MonodromyGradient g;
    g.mono = ps.mono;
    const Mat2& Mo = ps.mono.M;
    const cplx lam = ps.mono.lambda;
    const size_t N = ps.M.size();
    for (auto& e : g.entry) {
        e = empty_like(ps.rule);
        e.q.resize(N);
        e.p.resize(N);
        if (form == QForm::Derivative) e.qx.resize(N);
    }
    const Mat2 iR{-1.0, 0.0, 0.0, 1.0};
    const Mat2 Z{0.0, 1.0, 1.0, 0.0};
    for (size_t i = 0; i < N; ++i) {
        const Mat2& M = ps.M[i];
        const Mat2 Mi = M.inv_unimodular();
        const Mat2 X{0.0, ps.eq[i], ps.emq[i], 0.0};
        const Mat2 kp = cplx(-0.25) * (Mo * Mi * iR * M);
        Mat2 kq, kqx;
        if (form == QForm::Boundary) {
            kq = cplx(-0.5) * (Mo * Mi * (lam * Z + (1.0 / (16.0 * lam)) * X) * M);
        } else {
            kqx = kp;
            kq = (-1.0 / (16.0 * lam)) * (Mo * Mi * X * M);
        }
        const cplx* pq = &kq.a;
        const cplx* pp = &kp.a;
        const cplx* pqx = &kqx.a;
        for (int j = 0; j < 4; ++j) {
            g.entry[j].q[i] = pq[j];
            g.entry[j].p[i] = pp[j];
            if (form == QForm::Derivative) g.entry[j].qx[i] = pqx[j];
        }
    }
    if (form == QForm::Boundary) {
        g.entry[1].ev0 = 0.5 * Mo.b;
        g.entry[2].ev0 = -0.5 * Mo.c;
    }
    return g;
}

MonodromyGradient grad_monodromy(const Potential& v, cplx lambda, QForm form, double tol) {
    return grad_monodromy(sample_path(v, lambda, tol), form);
}

GradientKernel grad_discriminant(const PathSample& ps) {
    GradientKernel k = empty_like(ps.rule);
    const cplx lam = ps.mono.lambda;
    const cplx n2 = ps.mono.M.b, n3 = ps.mono.M.c, dl = ps.mono.delta;
    k.q.resize(ps.M.size());
    k.p.resize(ps.M.size());
    for (size_t i = 0; i < ps.M.size(); ++i) {
        const cplx m1 = ps.M[i].a, m2 = ps.M[i].b, m3 = ps.M[i].c, m4 = ps.M[i].d;
        const cplx eq = ps.eq[i], emq = ps.emq[i];
        k.q[i] = lam / 4.0 * (n2 * (m3 * m3 - m1 * m1) + n3 * (m2 * m2 - m4 * m4) + 2.0 * dl * (m1 * m2 - m3 * m4)) +
                 1.0 / (64.0 * lam) *
                     (emq * (n3 * m2 * m2 - n2 * m1 * m1 + 2.0 * dl * m1 * m2) +
                      eq * (n2 * m3 * m3 - n3 * m4 * m4 - 2.0 * dl * m3 * m4));
        k.p[i] = 0.25 * (-n2 * m1 * m3 + n3 * m2 * m4 + dl * (m1 * m4 + m2 * m3));
    }
    return k;
}

GradientKernel grad_antidiscriminant(const PathSample& ps) {
    GradientKernel k = empty_like(ps.rule);
    const cplx lam = ps.mono.lambda;
    const cplx n2 = ps.mono.M.b, n3 = ps.mono.M.c, D = ps.mono.Delta;
    k.q.resize(ps.M.size());
    k.p.resize(ps.M.size());
    for (size_t i = 0; i < ps.M.size(); ++i) {
        const cplx m1 = ps.M[i].a, m2 = ps.M[i].b, m3 = ps.M[i].c, m4 = ps.M[i].d;
        const cplx eq = ps.eq[i], emq = ps.emq[i];
        k.q[i] = lam / 4.0 * (n2 * (m3 * m3 - m1 * m1) + n3 * (m4 * m4 - m2 * m2) + 2.0 * D * (m1 * m2 - m3 * m4)) -
                 1.0 / (64.0 * lam) *
                     (emq * (n2 * m1 * m1 + n3 * m2 * m2 - 2.0 * D * m1 * m2) +
                      eq * (-n3 * m4 * m4 - n2 * m3 * m3 + 2.0 * D * m3 * m4));
        k.p[i] = 0.25 * (-n3 * m2 * m4 - n2 * m1 * m3 + D * (m1 * m4 + m2 * m3));
    }
    return k;
}

GradientKernel grad_discriminant(const Potential& v, cplx lambda, double tol) {
    return grad_discriminant(sample_path(v, lambda, tol));
}

GradientKernel grad_antidiscriminant(const Potential& v, cplx lambda, double tol) {
    return grad_antidiscriminant(sample_path(v, lambda, tol));
}

GradientKernel grad_expression(const PathSample& ps, const std::vector<cplx>& f1, const std::vector<cplx>& f2) {
    GradientKernel k = empty_like(ps.rule);
    const cplx lam = ps.mono.lambda;
    const size_t N = ps.M.size();
    if (f1.size() != N || f2.size() != N) throw InputError("eigenfunction samples do not match the grid");
    k.q.resize(N);
    k.p.resize(N);
    for (size_t i = 0; i < N; ++i) {
        const cplx a = f1[i] * f1[i], b = f2[i] * f2[i];
        k.q[i] = lam / 2.0 * (b - a) + (b * ps.eq[i] - a * ps.emq[i]) / (32.0 * lam);
        k.p[i] = -0.5 * f1[i] * f2[i];
    }
    return k;
}

GradientKernel grad_expression(const PathSample& ps, cplx a1, cplx a2) {
    std::vector<cplx> f1(ps.M.size()), f2(ps.M.size());
    for (size_t i = 0; i < ps.M.size(); ++i) {
        f1[i] = ps.M[i].a * a1 + ps.M[i].b * a2;
        f2[i] = ps.M[i].c * a1 + ps.M[i].d * a2;
    }
    return grad_expression(ps, f1, f2);
}

namespace {

void require_simple(cplx deriv, cplx lambda) {
    if (std::abs(deriv) <= 1e-8 * std::max(1.0, std::abs(lambda)))
        throw InputError("gradient undefined at multiple eigenvalue");
}

}  // namespace

GradientKernel grad_dirichlet_at(const Potential& v, cplx mu, double tol) {
    const PathSample ps = sample_path(v, mu, tol);
    const cplx chid = ps.mono.chi_D_dot();
    require_simple(chid, mu);
    return (ps.mono.M.a / chid) * grad_expression(ps, 0.0, 1.0);
}

GradientKernel grad_dirichlet(const Potential& v, int n, const SpectrumOptions& opt) {
    return grad_dirichlet_at(v, locate_dirichlet(v, n, opt), opt.tol);
}

GradientKernel grad_periodic_at(const Potential& v, cplx lambda, PeriodicForm form, double tol) {
    const PathSample ps = sample_path(v, lambda, tol);
    const auto& r = ps.mono;
    require_simple(r.Delta_dot, lambda);
    if (form == PeriodicForm::Chain) return (-1.0 / r.Delta_dot) * grad_discriminant(ps);
    const cplx n2 = r.M.b, n3 = r.M.c;
    if (std::max(std::abs(n2), std::abs(n3)) < 1e-12) throw InputError("gradient undefined at multiple eigenvalue");
    // eigenfunction m2 M_1 - delta M_2, or m3 M_2 + delta M_1
    if (std::abs(n2) >= std::abs(n3))
        return (-1.0 / (2.0 * r.Delta_dot * n2)) * grad_expression(ps, n2, -r.delta);
    return (1.0 / (2.0 * r.Delta_dot * n3)) * grad_expression(ps, r.delta, n3);
}

GradientKernel grad_periodic(const Potential& v, int n, int which, const SpectrumOptions& opt) {
    const auto pm = locate_periodic(v, n, opt);
    return grad_periodic_at(v, which > 0 ? pm.second : pm.first, PeriodicForm::Eigenfunction, opt.tol);
}

GradientKernel grad_m4_at_dirichlet_at(const Potential& v, cplx mu, double tol) {
    const PathSample ps = sample_path(v, mu, tol);
    require_simple(ps.mono.chi_D_dot(), mu);
    const cplx n3 = ps.mono.M.c, n4 = ps.mono.M.d;
    return (-n3) * grad_expression(ps, 0.0, 1.0) +
           (n4 / 4.0) * (grad_expression(ps, 1.0, 1.0) + cplx(-1.0) * grad_expression(ps, 1.0, -1.0));
}

GradientKernel grad_m4_at_dirichlet(const Potential& v, int n, const SpectrumOptions& opt) {
    return grad_m4_at_dirichlet_at(v, locate_dirichlet(v, n, opt), opt.tol);
}

MonodromyResult integrate_fixed(const Potential& v, cplx lambda, cplx ref) {
    if (ref == 0.0) ref = lambda;
    IntegratorOptions o;
    const double f = std::abs(ref) + 1.0 / (16.0 * std::abs(ref)) + 2.0 + 2.0 * pi * v.Kf();
    o.fixed_steps = int(std::ceil(512.0 * f));
    return integrate(v, lambda, o);
}

namespace {

// Newton until the step is below 1e-9 (relative), then exactly two more steps. A fixed tail of
// full steps keeps the result a smooth function of v; stopping on a tolerance would not.
template <class Step>
cplx newton_fixed(cplx lam, Step step, const char* failure) {
    for (int it = 0; it < 40; ++it) {
        const cplx s = step(lam);
        lam -= s;
        if (std::abs(s) <= 1e-9 * std::abs(lam)) {
            lam -= step(lam);
            lam -= step(lam);
            return lam;
        }
    }
    throw NumericalError(failure);
}

}  // namespace

cplx newton_periodic(const Potential& v, cplx start, cplx sigma) {
    return newton_fixed(start, [&](cplx lam) {
        const auto r = integrate_fixed(v, lam, start);
        return (r.Delta - sigma) / r.Delta_dot;
    }, "periodic eigenvalue Newton did not converge");
}

cplx newton_dirichlet(const Potential& v, cplx start) {
    return newton_fixed(start, [&](cplx lam) {
        const auto r = integrate_fixed(v, lam, start);
        return r.M.b / r.Md.b;
    }, "Dirichlet eigenvalue Newton did not converge");
}

FDCheck fd_check(const std::string& quantity, int n, int direction, const GradientKernel& k, const Potential& v,
                 const Potential& dir, const std::function<cplx(const Potential&)>& f, const FDOptions& opt,
                 std::map<double, cplx>* cache) {
    FDCheck c;
    c.quantity = quantity;
    c.n = n;
    c.direction = direction;
    c.analytic = k.pair(dir);
    auto central = [&](double e) {
        if (cache)
            if (const auto it = cache->find(e); it != cache->end()) return it->second;
        const cplx d = (f(v.axpy(e, dir)) - f(v.axpy(-e, dir))) / (2.0 * e);
        if (cache) (*cache)[e] = d;
        return d;
    };
    c.fd = central(opt.eps);
    // identically vanishing gradients (Delta, delta at v = 0) are compared absolutely
    c.absolute = std::abs(c.analytic) < opt.zero_floor;
    const double scale = c.absolute ? 1.0 : std::abs(c.analytic);
    c.rel_err = std::abs(c.fd - c.analytic) / scale;
    // rounding noise in f (absolute, ~ err * eps) from two small steps; the smaller error bounds any
    // eps-independent bias between the FD oracle and the analytic kernel
    const double err3 = std::abs(central(3.0 * opt.eps) - c.analytic) / scale;
    const double noise_f = std::max(c.rel_err * opt.eps, err3 * 3.0 * opt.eps);
    const double bias = std::min(c.rel_err, err3);
    c.saturated = true;
    for (const double e : opt.order_decades) {
        c.order_eps = e;
        c.err_order_hi = std::abs(central(e) - c.analytic) / scale;
        c.err_order_lo = std::abs(central(e / 10.0) - c.analytic) / scale;
        const double floor = std::max(noise_f / (e / 10.0), bias);
        if (c.err_order_lo >= opt.noise_margin * floor) {
            c.saturated = false;
            break;
        }
    }
    c.order = std::log10(c.err_order_hi / std::max(c.err_order_lo, 1e-300));
    // a vanishing gradient whose differences vanish at every step has no truncation error to observe
    c.exact = c.absolute && c.saturated && c.err_order_hi <= opt.zero_floor;
    c.pass = c.rel_err <= opt.max_rel && (c.exact || c.order >= opt.min_order);
    return c;
}

std::vector<Potential> fd_directions(std::uint64_t seed, int count, int Kf) {
    std::mt19937_64 g(seed);
    std::vector<Potential> d;
    for (int i = 0; i < count; ++i) d.push_back(Potential::random_direction(g(), Kf));
    return d;
}

std::vector<FDCheck> gradient_fd_suite(const Potential& v, const GradientSuiteOptions& opt) {
    std::vector<FDCheck> out;
    const auto dirs = fd_directions(opt.seed, opt.directions);
    // central differences per (function, direction), shared by kernels of the same quantity
    std::map<std::pair<std::string, size_t>, std::map<double, cplx>> memo;
    auto run = [&](const std::string& name, int n, const GradientKernel& k,
                   const std::function<cplx(const Potential&)>& f, const std::string& fkey = {}) {
        const std::string key = (fkey.empty() ? name : fkey) + "#" + std::to_string(n);
        for (size_t d = 0; d < dirs.size(); ++d)
            out.push_back(fd_check(name, n, int(d), k, v, dirs[d], f, opt.fd, &memo[{key, d}]));
    };

    const cplx lam = opt.lambda;
    const PathSample ps = sample_path(v, lam);
    const auto gm = grad_monodromy(ps, QForm::Boundary);
    const auto gd = grad_monodromy(ps, QForm::Derivative);
    const char* names[4] = {"m1", "m2", "m3", "m4"};
    for (int j = 0; j < 4; ++j) {
        auto f = [lam, j](const Potential& w) {
            const Mat2 M = integrate_fixed(w, lam).M;
            return (&M.a)[j];
        };
        run(std::string("M.") + names[j], 0, gm.entry[j], f);
        run(std::string("M.") + names[j] + ".dx", 0, gd.entry[j], f, std::string("M.") + names[j]);
    }
    run("Delta", 0, grad_discriminant(ps), [lam](const Potential& w) { return integrate_fixed(w, lam).Delta; });
    run("delta", 0, grad_antidiscriminant(ps), [lam](const Potential& w) { return integrate_fixed(w, lam).delta; });

    for (int n : opt.dirichlet_n) {
        const cplx mu = newton_dirichlet(v, locate_dirichlet(v, n, opt.spectrum));
        run("mu", n, grad_dirichlet_at(v, mu), [mu](const Potential& w) { return newton_dirichlet(w, mu); });
        run("m4@mu", n, grad_m4_at_dirichlet_at(v, mu),
            [mu](const Potential& w) { return integrate_fixed(w, mu).M.d; });
    }
    for (int n : opt.periodic_n) {
        const auto pm = locate_periodic(v, n, opt.spectrum);
        for (int which : {-1, +1}) {
            const cplx start = which > 0 ? pm.second : pm.first;
            const cplx sigma = (n % 2 == 0) ? 1.0 : -1.0;
            const cplx l0 = newton_periodic(v, start, sigma);
            auto f = [l0, sigma](const Potential& w) { return newton_periodic(w, l0, sigma); };
            const std::string nm = which > 0 ? "lambda+" : "lambda-";
            run(nm, n, grad_periodic_at(v, l0, PeriodicForm::Eigenfunction), f);
            run(nm + ".chain", n, grad_periodic_at(v, l0, PeriodicForm::Chain), f, nm);
        }
    }
    return out;
}

}  // namespace sgl
