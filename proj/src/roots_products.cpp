#include "sgl/roots_products.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sgl/kernels.hpp"

namespace sgl {

namespace {

// s_k^2 - k^2 pi^2 for k >= 1, without cancellation
double zero_root_defect(int k) {
    const double kp = k * pi;
    const double r = std::sqrt(kp * kp + 0.25);
    return (kp / (2.0 * (r + kp)) + 0.25) / 4.0;
}

// prod_{k>L} (1 - z^2/(k pi)^2)
cplx sine_tail(int L, cplx z) {
    cplx s;
    if (std::abs(z) < 1e-6) {
        s = 1.0 - z * z / 6.0;
    } else {
        s = std::sin(z) / z;
    }
    cplx head = 1.0;
    for (int k = 1; k <= L; ++k) head *= 1.0 - z * z / (k * k * pi * pi);
    return s / head;
}

}  // namespace

cplx zero_tail(int L, cplx z, cplx shift) {
    if (L < 0) throw InputError("tail index must be non-negative");
    // (s_k - z)(-s_k - z)/(k pi (-k pi)) = (s_k^2 - z^2)/(k pi)^2
    //   = (1 - z^2/(k pi)^2)(1 + d_k/((k pi)^2 - z^2)),  d_k = s_k^2 - (k pi)^2 -> 1/8
    const cplx S = sine_tail(L, z);
    const int Kb = std::max({2 * L, L + 64, int(std::ceil(2.0 * std::abs(z) / pi)) + 64});
    cplx logC = 0.0;
    for (int k = L + 1; k <= Kb; ++k) {
        const double kp2 = k * k * pi * pi;
        logC += std::log(1.0 + zero_root_defect(k) / (kp2 - z * z));
    }
    // sum_{k>Kb} with d_k ~ 1/8: first and second order terms of the log
    const double a = Kb + 0.5;
    const cplx c = z / pi;
    const cplx u = c / a;
    const cplx s1 = std::abs(u) < 1e-8 ? cplx(1.0 / a) : std::atanh(u) / (u * a);
    // midpoint rule correction for sum_{k>Kb} 1/(k^2 - c^2) against its integral
    const cplx em = a / (12.0 * (a * a - c * c) * (a * a - c * c));
    logC += (s1 - em) / (8.0 * pi * pi);
    // fourth order: d_k = 1/8 - 1/(256 k^2 pi^2) + ..., together with -d_k^2/2 this gives -3/(256 k^4 pi^4)
    logC -= 1.0 / (256.0 * std::pow(pi, 4) * a * a * a);
    if (shift != 0.0) {
        // (s_k + c/k)^2 - z^2 = (s_k^2 - z^2)(1 + e_k/(s_k^2 - z^2)),  e_k = 2 s_k c/k + c^2/k^2 -> 2 pi c
        for (int k = L + 1; k <= Kb; ++k) {
            const double sk = zero_tau(k);
            const cplx ek = 2.0 * sk * shift / double(k) + shift * shift / (double(k) * k);
            logC += std::log(1.0 + ek / (sk * sk - z * z));
        }
        logC += 2.0 * shift / pi * (s1 - em);
    }
    return S * std::exp(logC);
}

cplx standard_root_value(cplx tau, cplx gamma, cplx z) {
    const cplx u = tau - z;
    if (gamma == 0.0) return u;
    return u * sqrt_plus(1.0 - gamma * gamma / (4.0 * u * u));
}

cplx standard_root(const SpectrumTable& t, int j, int n, cplx lambda) {
    const cplx z = j == 1 ? lambda : -1.0 / (16.0 * lambda);
    const cplx lp = t.lam(j, n, +1), lm = t.lam(j, n, -1);
    const double tol = 1e-10 * std::max(1.0, std::abs(z));
    if (lp != lm && (std::abs(z - lp) < tol || std::abs(z - lm) < tol))
        throw InputError("lambda at a gap endpoint: branch ambiguous");
    return standard_root_value(0.5 * (lp + lm), lp - lm, z);
}

NodeProduct::NodeProduct(std::vector<cplx> a, int K, bool tail, cplx shift)
    : a_(std::move(a)), K_(K), tail_(tail), shift_(shift) {
    if (int(a_.size()) != 2 * K + 1) throw InputError("node product needs 2K+1 nodes");
    inv_d_.resize(a_.size());
    for (int k = -K; k <= K; ++k) inv_d_[k + K] = 1.0 / pi_n(k);
}

cplx NodeProduct::operator()(cplx z) const {
    cplx out;
    eval(&z, 1, &out);
    return out;
}

void NodeProduct::eval(const cplx* z, int n, cplx* out) const {
    kernels::node_product(a_.data(), inv_d_.data(), int(a_.size()), z, n, out);
    if (tail_)
        for (int j = 0; j < n; ++j) out[j] *= zero_tail(K_, z[j], shift_);
}

cplx NodeProduct::without(int k, cplx z) const {
    cplx p = 1.0;
    for (int m = -K_; m <= K_; ++m)
        if (m != k) p *= (a_[m + K_] - z) * inv_d_[m + K_];
    if (tail_) p *= zero_tail(K_, z, shift_);
    return p;
}

CanonicalRoots::CanonicalRoots(const SpectrumTable& t, int K) : t_(t), K_(K) {
    if (K < 0) throw InputError("truncation K must be non-negative");
    for (int j = 1; j <= 2; ++j) {
        tau_[j - 1].resize(2 * K + 1);
        gam_[j - 1].resize(2 * K + 1);
        for (int k = -K; k <= K; ++k) {
            tau_[j - 1][k + K] = t.tau(j, k);
            gam_[j - 1][k + K] = t.gamma(j, k);
        }
    }
    // Closed form: sqrt+(l0+ l0-) prod_{1<=m<=K} l_m+ l_m- / pi_m^2, times the tail at 0.
    cplx c1 = sqrt_plus(t.lam(1, 0, +1) * t.lam(1, 0, -1));
    cplx c2 = sqrt_plus(t.lam(2, 0, +1) * t.lam(2, 0, -1));
    for (int m = 1; m <= K; ++m) {
        c1 *= t.lam(1, m, +1) * t.lam(1, m, -1) / (pi_n(m) * pi_n(m));
        c2 *= t.lam(2, m, +1) * t.lam(2, m, -1) / (pi_n(m) * pi_n(m));
    }
    shift_[0] = t.tail_shift(1, SpectrumTable::Node::Tau);
    shift_[1] = t.tail_shift(2, SpectrumTable::Node::Tau);
    chi1_zero_ = c1 * zero_tail(K, 0.0, shift_[0]);
    chi2_inf_ = c2 * zero_tail(K, 0.0, shift_[1]);
    D_ = std::sqrt(chi1_zero_ * chi2_inf_);
    if (std::abs(D_ - chi1_zero_) > std::abs(D_ + chi1_zero_)) D_ = -D_;
}

cplx CanonicalRoots::F(int j, cplx z) const {
    const auto& tau = tau_[j - 1];
    const auto& gam = gam_[j - 1];
    cplx p = 1.0;
    for (int k = -K_; k <= K_; ++k) p *= standard_root_value(tau[k + K_], gam[k + K_], z) / pi_n(k);
    return p * zero_tail(K_, z, shift_[j - 1]);
}

cplx CanonicalRoots::chip(cplx lambda) const { return I * chi1(lambda) * chi2(lambda) / D_; }

cplx CanonicalRoots::f1n(int n, cplx lambda) const {
    if (std::abs(n) > K_) throw InputError("f_{1,n} index beyond truncation");
    cplx p = 1.0 / pi_n(n);
    for (int k = -K_; k <= K_; ++k)
        if (k != n) p *= standard_root_value(tau_[0][k + K_], gam_[0][k + K_], lambda) / pi_n(k);
    return p * zero_tail(K_, lambda, shift_[0]);
}

double ProductReport::max_residual() const { return std::max({max_delta_dot, max_chi_D, max_chi_p}); }

std::vector<cplx> product_sample_points() {
    return {cplx(0.7, 0.0),  cplx(1.3, 0.2),   cplx(5.1, 0.0),  cplx(2.0, 1.0),   cplx(0.1, 0.05),
            cplx(0.3, 0.05), cplx(-1.7, 0.4),  cplx(11.3, 0.5), cplx(0.03, 0.02), cplx(7.9, -0.3)};
}

namespace {

NodeProduct family(const SpectrumTable& t, int K, int j, cplx (*get)(const SpectrumTable&, int, int),
                   SpectrumTable::Node node) {
    std::vector<cplx> a(2 * K + 1);
    for (int k = -K; k <= K; ++k) a[k + K] = get(t, j, k);
    return NodeProduct(std::move(a), K, true, t.tail_shift(j, node));
}

cplx get_plus(const SpectrumTable& t, int j, int k) { return t.lam(j, k, +1); }
cplx get_minus(const SpectrumTable& t, int j, int k) { return t.lam(j, k, -1); }
cplx get_mu(const SpectrumTable& t, int j, int k) { return t.mu(j, k); }
cplx get_ldot(const SpectrumTable& t, int j, int k) { return t.lambda_dot(j, k); }

}  // namespace

cplx constraint_delta_dot(const SpectrumTable& t, int K) {
    const cplx s = t.lambda_dot_star;
    cplx p = -s * s * std::pow(16.0 * t.at(0).lambda_dot, 2);
    for (int n = 1; n <= std::min(K, t.N_max); ++n) p *= std::pow(t.at(n).lambda_dot * 16.0 * t.at(-n).lambda_dot, 2);
    return p;
}

cplx constraint_dirichlet(const SpectrumTable& t, int K, cplx q0) {
    cplx p = std::exp(-q0) * 16.0 * t.at(0).mu * t.at(0).mu;
    for (int n = 1; n <= std::min(K, t.N_max); ++n) p *= std::pow(t.at(n).mu * 16.0 * t.at(-n).mu, 2);
    return p;
}

cplx constraint_periodic(const SpectrumTable& t, int K) {
    cplx p = std::pow(16.0 * t.at(0).plus * t.at(0).minus, 2);
    for (int n = 1; n <= std::min(K, t.N_max); ++n)
        p *= std::pow(t.at(n).plus * 16.0 * t.at(-n).plus, 2) * std::pow(t.at(n).minus * 16.0 * t.at(-n).minus, 2);
    return p;
}

ProductReport verify_product_reps(const Potential& v, const SpectrumTable& t, int K, const std::vector<cplx>& lambdas,
                                  double tol) {
    ProductReport rep;
    rep.K = K;
    using Node = SpectrumTable::Node;
    const auto d1 = family(t, K, 1, get_ldot, Node::Dot), d2 = family(t, K, 2, get_ldot, Node::Dot);
    const auto m1 = family(t, K, 1, get_mu, Node::Mu), m2 = family(t, K, 2, get_mu, Node::Mu);
    const auto p1 = family(t, K, 1, get_plus, Node::Tau), q1 = family(t, K, 1, get_minus, Node::Tau);
    const auto p2 = family(t, K, 2, get_plus, Node::Tau), q2 = family(t, K, 2, get_minus, Node::Tau);
    const cplx d2inf = d2(0.0), m2inf = m2(0.0), chi1zero = p1(0.0) * q1(0.0);
    const cplx s = t.lambda_dot_star;
    IntegratorOptions o;
    o.tol = tol;
    for (const cplx lam : lambdas) {
        const auto r = integrate(v, lam, o);
        const cplx z = -1.0 / (16.0 * lam);
        const cplx dd = (1.0 - s * s / (lam * lam)) * d1(lam) * d2(z) / d2inf;
        const cplx cd = -m1(lam) * m2(z) / m2inf;
        const cplx cp = -p1(lam) * q1(lam) * p2(z) * q2(z) / chi1zero;
        ProductSample ps;
        ps.lambda = lam;
        ps.res_delta_dot = std::abs(dd - r.Delta_dot) / std::abs(r.Delta_dot);
        ps.res_chi_D = std::abs(cd - r.chi_D()) / std::abs(r.chi_D());
        ps.res_chi_p = std::abs(cp - r.chi_p()) / std::abs(r.chi_p());
        rep.max_delta_dot = std::max(rep.max_delta_dot, ps.res_delta_dot);
        rep.max_chi_D = std::max(rep.max_chi_D, ps.res_chi_D);
        rep.max_chi_p = std::max(rep.max_chi_p, ps.res_chi_p);
        rep.samples.push_back(ps);
    }
    rep.constraint_delta_dot = constraint_delta_dot(t, K);
    rep.constraint_dirichlet = constraint_dirichlet(t, K, v.q(0.0));
    rep.constraint_dirichlet_plus = rep.constraint_dirichlet * std::exp(2.0 * v.q(0.0));
    rep.constraint_periodic = constraint_periodic(t, K);
    return rep;
}

SignReport sign_tables(const CanonicalRoots& roots, int nmax, int spi) {
    const auto& t = roots.table();
    SignReport rep;
    nmax = std::min(nmax, std::min(t.N_max, roots.K()) - 1);
    auto fail = [&](const char* rule, int n, cplx lam, cplx val) { rep.violations.push_back({rule, n, lam, val}); };
    auto samples = [&](double a, double b, auto&& fn) {
        for (int s = 1; s <= spi; ++s) fn(a + (b - a) * s / (spi + 1.0));
    };
    const double lm1p = t.at(-1).plus.real(), l0p = t.at(0).plus.real();
    // (-1)^n Im chip > 0 between consecutive 1-gaps, away from the 2-gaps accumulating at 0
    auto clear_of_origin = [&](double x) { return x > lm1p || x < -l0p; };
    for (int n = -nmax; n <= nmax; ++n) {
        const double a = t.lam(1, n - 1, +1).real(), b = t.lam(1, n, -1).real();
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        samples(a, b, [&](double x) {
            if (!clear_of_origin(x)) {
                ++rep.skipped;
                return;
            }
            ++rep.checked;
            const cplx val = roots.chip(x);
            if (!(sgn * val.imag() > 0)) fail("Im chip between 1-gaps", n, x, val);
        });
    }
    // Same in the variable mu = -1/(16 lambda) between consecutive 2-gaps
    const double m1p = (1.0 / (16.0 * t.at(1).minus)).real(), m0p = (1.0 / (16.0 * t.at(0).minus)).real();
    for (int n = -nmax; n <= nmax; ++n) {
        const double a = t.lam(2, n - 1, +1).real(), b = t.lam(2, n, -1).real();
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        samples(a, b, [&](double mu) {
            if (!(mu > m1p || mu < -m0p) || mu == 0.0) {
                ++rep.skipped;
                return;
            }
            ++rep.checked;
            const double x = -1.0 / (16.0 * mu);
            const cplx val = roots.chip(x);
            if (!(sgn * val.imag() > 0)) fail("Im chip between 2-gaps", n, x, val);
        });
    }
    // Gap interiors approached from below: (-1)^{n+1} chip > 0
    for (int j = 1; j <= 2; ++j)
        for (int n = -nmax; n <= nmax; ++n) {
            const double a = t.lam(j, n, -1).real(), b = t.lam(j, n, +1).real();
            const double sgn = (n % 2 == 0) ? -1.0 : 1.0;
            if (!(b - a > 1e-9 * std::max(1.0, std::abs(a)))) {
                rep.skipped += spi;
                continue;
            }
            samples(a, b, [&](double zz) {
                ++rep.checked;
                const double x = j == 1 ? zz : -1.0 / (16.0 * zz);
                const double eps = 1e-7 * (j == 1 ? (b - a) : (b - a) / (16.0 * zz * zz));
                const cplx val = roots.chip_below(x, eps);
                if (!(sgn * val.real() > 0 && std::abs(val.imag()) <= 1e-3 * std::abs(val)))
                    fail(j == 1 ? "chip on 1-gap from below" : "chip on 2-gap from below", n, x, val);
            });
        }
    // (-1)^n f_{1,n} > 0 between the flanking gaps
    for (int n = -nmax; n <= nmax; ++n) {
        const double a = t.lam(1, n - 1, +1).real(), b = t.lam(1, n + 1, -1).real();
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        samples(a, b, [&](double x) {
            ++rep.checked;
            const cplx val = roots.f1n(n, x);
            if (!(sgn * val.real() > 0)) fail("f_{1,n} sign", n, x, val);
        });
    }
    return rep;
}

cplx family_f1(const NodeFamily& nf, cplx lambda) {
    cplx p = 1.0;
    for (int k = -nf.K; k <= nf.K; ++k) p *= (nf.s1(k) - lambda) / pi_n(k);
    return p;
}

cplx family_f2(const NodeFamily& nf, cplx lambda) {
    cplx p = 1.0;
    const cplx w = 1.0 / (16.0 * lambda);
    for (int k = -nf.K; k <= nf.K; ++k) p *= (nf.s2(k) + w) / pi_n(k);
    return p;
}

cplx family_f2_inf(const NodeFamily& nf) {
    cplx p = 1.0;
    for (int k = -nf.K; k <= nf.K; ++k) p *= nf.s2(k) / pi_n(k);
    return p;
}

cplx interpolate_reconstruct(const NodeFamily& nf, const std::vector<cplx>& phi1, const std::vector<cplx>& phi2,
                             cplx z) {
    const int K = nf.K;
    std::vector<cplx> nodes;
    for (int k = -K; k <= K; ++k) nodes.push_back(nf.s1(k));
    for (int k = -K; k <= K; ++k) nodes.push_back(nf.kappa(k));
    for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = i + 1; j < nodes.size(); ++j)
            if (std::abs(nodes[i] - nodes[j]) < 1e-12 * std::max(1.0, std::abs(nodes[i])))
                throw InputError("interpolation nodes collide");
    for (const auto& a : nodes)
        if (z == a) throw InputError("evaluation point coincides with a node");
    const cplx fz = family_f1(nf, z) * family_f2(nf, z);
    cplx sum = 0.0;
    for (int n = -K; n <= K; ++n) {
        // f'(sigma_{1,n}) = -(1/pi_n) prod_{k != n} (sigma_{1,k} - sigma_{1,n})/pi_k * f2(sigma_{1,n})
        const cplx s = nf.s1(n);
        if (phi1[n + K] != 0.0) {
            cplx d = -1.0 / pi_n(n);
            for (int k = -K; k <= K; ++k)
                if (k != n) d *= (nf.s1(k) - s) / pi_n(k);
            d *= family_f2(nf, s);
            sum += phi1[n + K] / d * fz / (z - s);
        }
        // f'(kappa_n) = f1(kappa) (-1/(16 kappa^2 pi_n)) prod_{k != n} (sigma_{2,k} + 1/(16 kappa))/pi_k
        const cplx kap = nf.kappa(n);
        if (phi2[n + K] != 0.0) {
            cplx d = family_f1(nf, kap) * (-1.0 / (16.0 * kap * kap * pi_n(n)));
            const cplx w = 1.0 / (16.0 * kap);
            for (int k = -K; k <= K; ++k)
                if (k != n) d *= (nf.s2(k) + w) / pi_n(k);
            sum += phi2[n + K] / d * fz / (z - kap);
        }
    }
    return sum;
}

std::vector<double> ratio_asymptotics(const CanonicalRoots& roots, int mmax) {
    std::vector<double> r;
    const auto& t = roots.table();
    for (int m = 1; m <= mmax; ++m) {
        const cplx c = m * pi;
        const cplx lp = t.lam(1, m, +1), lm = t.lam(1, m, -1);
        // skip centres that fall on the gap segment
        if (std::abs(lp - lm) > 0 && std::abs(c - 0.5 * (lp + lm)) <= 0.5 * std::abs(lp - lm)) {
            r.push_back(NAN);
            continue;
        }
        const cplx w = standard_root(t, 1, m, c);
        const cplx om = omega(c);
        const cplx val = w * (-I * std::sin(om)) / (roots.chip(c) * (pi_n(m) - om));
        r.push_back(std::abs(val - 1.0));
    }
    return r;
}

std::vector<double> product_ratio_bound(const CanonicalRoots& roots, const std::vector<cplx>& sigma1, int nmax,
                                        int nodes) {
    const int K = roots.K();
    if (int(sigma1.size()) != 2 * K + 1) throw InputError("sigma1 must have 2K+1 entries");
    const auto& t = roots.table();
    std::vector<double> out;
    for (int n = 0; n <= nmax; ++n) {
        const auto c = gamma_contour(t, 1, n, 0.45, nodes);
        const auto nd = contour_nodes(c);
        double sup = 0.0;
        for (const cplx lam : nd.z) {
            cplx p = 1.0;
            for (int m = -K; m <= K; ++m)
                if (m != n) p *= (sigma1[m + K] - lam) / standard_root(t, 1, m, lam);
            sup = std::max(sup, std::abs(p - 1.0));
        }
        out.push_back(sup);
    }
    return out;
}

}  // namespace sgl
