#include "sgl/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgl {

namespace {

// State: M, dM/dlambda, d2M/dlambda2 stacked as 12 complex numbers.
struct State {
    std::array<cplx, 12> y{};
};

struct Rhs {
    const LaxFields* f;
    cplx lam, il, il2, il3;
    bool second;

    void operator()(double x, const State& s, State& out) const {
        cplx a, ep, em;
        f->eval(x, a, ep, em);
        // L = J(lambda - A - B^2/lambda)
        const cplx l11 = 0.25 * a, l12 = lam - ep * il / 16.0;
        const cplx l21 = -(lam - em * il / 16.0), l22 = -0.25 * a;
        // L_lambda = J(1 + B^2/lambda^2), off-diagonal
        const cplx d12 = 1.0 + ep * il2 / 16.0, d21 = -(1.0 + em * il2 / 16.0);
        const auto& y = s.y;
        auto& o = out.y;
        for (int col = 0; col < 2; ++col) {
            const cplx m1 = y[col], m3 = y[2 + col];
            const cplx n1 = y[4 + col], n3 = y[6 + col];
            o[col] = l11 * m1 + l12 * m3;
            o[2 + col] = l21 * m1 + l22 * m3;
            o[4 + col] = l11 * n1 + l12 * n3 + d12 * m3;
            o[6 + col] = l21 * n1 + l22 * n3 + d21 * m1;
            if (second) {
                // L_lambda_lambda = J(-2 B^2/lambda^3)
                const cplx e12 = -2.0 * ep * il3 / 16.0, e21 = 2.0 * em * il3 / 16.0;
                const cplx k1 = y[8 + col], k3 = y[10 + col];
                o[8 + col] = l11 * k1 + l12 * k3 + 2.0 * (d12 * n3) + e12 * m3;
                o[10 + col] = l21 * k1 + l22 * k3 + 2.0 * (d21 * n1) + e21 * m1;
            } else {
                o[8 + col] = 0.0;
                o[10 + col] = 0.0;
            }
        }
    }
};

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

Mat2 block(const State& s, int off) { return {s.y[off], s.y[off + 1], s.y[off + 2], s.y[off + 3]}; }

void finish(MonodromyResult& r) {
    r.Delta = 0.5 * (r.M.a + r.M.d);
    r.delta = 0.5 * (r.M.a - r.M.d);
    r.Delta_dot = 0.5 * (r.Md.a + r.Md.d);
    r.Delta_ddot = 0.5 * (r.Mdd.a + r.Mdd.d);
    const cplx root = std::sqrt(r.Delta * r.Delta - 1.0);
    r.xi_plus = r.Delta + root;
    r.xi_minus = r.Delta - root;
}

}  // namespace

MonodromyResult integrate(const Potential& v, cplx lambda, const IntegratorOptions& opt) {
    const double al = std::abs(lambda);
    if (!(al >= lambda_min && al <= lambda_max))
        throw InputError("lambda outside the working annulus [1e-8, 1e8]");
    if (!(opt.tol >= 1e-14 && opt.tol <= 1e-5)) throw InputError("integrator tolerance out of range");

    Rhs rhs{&v.lax(), lambda, 1.0 / lambda, 1.0 / (lambda * lambda), 1.0 / (lambda * lambda * lambda),
            opt.second_derivative};
    const int nvar = opt.second_derivative ? 12 : 8;

    State y;
    y.y[0] = 1.0;
    y.y[3] = 1.0;

    MonodromyResult r;
    r.lambda = lambda;
    std::size_t next_rec = 0;
    const std::vector<double>* rec = opt.record_x;
    if (rec) {
        r.path_x.reserve(rec->size());
        r.path.reserve(rec->size());
        while (next_rec < rec->size() && (*rec)[next_rec] <= 0.0) {
            r.path_x.push_back((*rec)[next_rec]);
            r.path.push_back(Mat2::identity());
            ++next_rec;
        }
    }

    const double freq = al + 1.0 / (16.0 * al) + 1.0;
    const bool fixed = opt.fixed_steps > 0;
    double h = fixed ? 1.0 / opt.fixed_steps : std::min(0.05, 0.5 / freq);
    double x = 0.0;
    State k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    rhs(x, y, k1);
    long steps = 0, rejects = 0;
    while (x < 1.0) {
        if (++steps + rejects > opt.max_steps)
            throw NumericalError("integrator exceeded max steps; last step " + std::to_string(h));
        double target = 1.0;
        if (rec && next_rec < rec->size()) target = std::min(target, (*rec)[next_rec]);
        bool land = false;
        const double h_try = h;
        if (x + h >= target - 1e-14) {
            h = target - x;
            land = true;
        }
        auto stage = [&](State& out, double cx, std::initializer_list<std::pair<double, const State*>> terms) {
            for (int i = 0; i < nvar; ++i) {
                cplx s = y.y[i];
                for (const auto& [c, k] : terms) s += h * c * k->y[i];
                tmp.y[i] = s;
            }
            rhs(x + cx * h, tmp, out);
        };
        stage(k2, c2, {{a21, &k1}});
        stage(k3, c3, {{a31, &k1}, {a32, &k2}});
        stage(k4, c4, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        stage(k5, c5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        stage(k6, 1.0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        for (int i = 0; i < nvar; ++i)
            ynew.y[i] = y.y[i] + h * (b1 * k1.y[i] + b3 * k3.y[i] + b4 * k4.y[i] + b5 * k5.y[i] + b6 * k6.y[i]);
        rhs(x + h, ynew, k7);

        // error scaled per block (M, dM, d2M)
        double err = 0.0;
        for (int blk = 0; blk < nvar / 4; ++blk) {
            double scale = 1.0;
            for (int i = 4 * blk; i < 4 * blk + 4; ++i)
                scale = std::max(scale, std::max(std::abs(y.y[i]), std::abs(ynew.y[i])));
            for (int i = 4 * blk; i < 4 * blk + 4; ++i) {
                const cplx e = h * (e1 * k1.y[i] + e3 * k3.y[i] + e4 * k4.y[i] + e5 * k5.y[i] +
                                    e6 * k6.y[i] + e7 * k7.y[i]);
                err = std::max(err, std::abs(e) / (opt.tol * scale));
            }
        }
        if (!std::isfinite(err)) throw NumericalError("integrator produced non-finite values");
        if (fixed) err = 0.0;
        if (err <= 1.0) {
            x = land ? target : x + h;
            y = ynew;
            k1 = k7;
            if (land && rec && next_rec < rec->size() && target == (*rec)[next_rec]) {
                while (next_rec < rec->size() && (*rec)[next_rec] <= x) {
                    r.path_x.push_back((*rec)[next_rec]);
                    r.path.push_back(block(y, 0));
                    ++next_rec;
                }
            }
            if (land && target >= 1.0) x = 1.0;
            const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = land ? std::max(h_try, h * std::clamp(fac, 0.2, 5.0)) : h * std::clamp(fac, 0.2, 5.0);
            if (fixed) h = 1.0 / opt.fixed_steps;
        } else {
            ++rejects;
            --steps;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-12) throw NumericalError("integrator step size underflow; last step " + std::to_string(h));
        }
    }
    r.M = block(y, 0);
    r.Md = block(y, 4);
    r.Mdd = opt.second_derivative ? block(y, 8) : Mat2::zero();
    r.steps = steps;
    finish(r);
    return r;
}

MonodromyResult closed_form_zero(cplx lambda) {
    if (lambda == cplx{}) throw InputError("lambda must be nonzero");
    MonodromyResult r;
    r.lambda = lambda;
    const cplx w = omega(lambda);
    const cplx wd = 1.0 + 1.0 / (16.0 * lambda * lambda);
    const cplx wdd = -1.0 / (8.0 * lambda * lambda * lambda);
    const cplx c = std::cos(w), s = std::sin(w);
    r.M = {c, s, -s, c};
    r.Md = {-s * wd, c * wd, -c * wd, -s * wd};
    r.Mdd = {-c * wd * wd - s * wdd, -s * wd * wd + c * wdd, s * wd * wd - c * wdd, -c * wd * wd - s * wdd};
    finish(r);
    return r;
}

cplx chi_p(const Potential& v, cplx lambda, double tol) {
    IntegratorOptions o;
    o.tol = tol;
    return integrate(v, lambda, o).chi_p();
}

cplx chi_D(const Potential& v, cplx lambda, double tol) {
    IntegratorOptions o;
    o.tol = tol;
    return integrate(v, lambda, o).chi_D();
}

}  // namespace sgl
