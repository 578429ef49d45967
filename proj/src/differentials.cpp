#include "sgl/differentials.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sgl/kernels.hpp"
#include "sgl/parallel.hpp"

namespace sgl {

namespace {

std::string sigma_name(int j, int k) {
    std::ostringstream os;
    os << "sigma_{" << j << "," << k << "}";
    return os.str();
}

// prod (a_k - z)/pi_k over the given nodes, one z at a time through the batched kernel.
void product(const std::vector<cplx>& a, const std::vector<double>& inv_d, const std::vector<cplx>& z,
             std::vector<cplx>& out) {
    out.resize(z.size());
    kernels::node_product(a.data(), inv_d.data(), int(a.size()), z.data(), int(z.size()), out.data());
}

// Nodes of f_{n,1} (k != n) and f_{n,2} with their 1/pi_k.
struct Factors {
    std::vector<cplx> a1, a2;
    std::vector<double> d1, d2;
    cplx inf{};  // prod sigma_{2,k}/pi_k over |k| <= K
};

Factors factors(const std::vector<cplx>& s1, const std::vector<cplx>& s2, int n, int K) {
    Factors f;
    for (int k = -K; k <= K; ++k) {
        if (k != n) {
            f.a1.push_back(s1[k + K]);
            f.d1.push_back(1.0 / pi_n(k));
        }
        f.a2.push_back(s2[k + K]);
        f.d2.push_back(1.0 / pi_n(k));
    }
    f.inf = 1.0;
    for (size_t i = 0; i < f.a2.size(); ++i) f.inf *= f.a2[i] * f.d2[i];
    return f;
}

cplx psi_value(int n, int K, cplx c1, cplx c2, const std::vector<cplx>& s1, const std::vector<cplx>& s2,
               cplx lambda) {
    if (lambda == 0.0) throw InputError("psi_n is not defined at lambda = 0");
    const Factors f = factors(s1, s2, n, K);
    const cplx zeta = -1.0 / (16.0 * lambda);
    std::vector<cplx> p1, p2;
    product(f.a1, f.d1, {lambda}, p1);
    product(f.a2, f.d2, {zeta}, p2);
    const cplx t = zero_tail(K, lambda, c1) * zero_tail(K, zeta, c2) / zero_tail(K, 0.0, c2);
    return -(1.0 / pi_n(n)) * p1[0] * p2[0] * t / f.inf;
}

}  // namespace

Disc family_disc(int m) {
    const int a = std::abs(m);
    const cplx c = m >= 0 ? DiscFamily::center(a) : -DiscFamily::center(a);
    return {c, DiscFamily::radius(a)};
}

DifferentialSystem::DifferentialSystem(const CanonicalRoots& roots, int n, const DifferentialOptions& opt)
    : roots_(roots), n_(n), K_(opt.K), opt_(opt) {
    if (n < 0) throw InputError("solve for n >= 0; psi_{-n} comes from the reflected potential");
    if (K_ < 1 || n > K_) throw InputError("need 0 <= n <= K and K >= 1");
    if (roots.K() < K_) throw InputError("canonical root truncation below K");
    const int E = size();
    contour_.resize(E);
    inv_chip_.resize(E);
    zeta_.resize(E);
    parallel_for(0, E, opt.threads, [&](int e) {
        const auto [j, m] = slot(e);
        contour_[e] = contour_nodes(gamma_contour(roots_.table(), j, m, opt_.rho, opt_.nodes));
        const auto& z = contour_[e].z;
        auto& ic = inv_chip_[e];
        auto& zt = zeta_[e];
        ic.resize(z.size());
        zt.resize(z.size());
        const cplx c1 = roots_.shift(1), c2 = roots_.shift(2);
        const cplx t0 = zero_tail(K_, 0.0, c2);
        for (size_t i = 0; i < z.size(); ++i) {
            zt[i] = -1.0 / (16.0 * z[i]);
            // sigma-independent parts: weight, zero-potential tails, 1/chip
            const cplx tail = zero_tail(K_, z[i], c1) * zero_tail(K_, zt[i], c2) / t0;
            ic[i] = contour_[e].w[i] * tail / roots_.chip(z[i]);
            if (!std::isfinite(std::abs(ic[i]))) {
                std::ostringstream os;
                os << "non-finite 1/chi_p at node " << i << " of Gamma_{" << j << "," << m << "}";
                throw NumericalError(os.str());
            }
        }
    });
}

std::pair<int, int> DifferentialSystem::slot(int i) const {
    if (i < 0 || i >= size()) throw InputError("slot index out of range");
    if (i < 2 * K_) {
        const int k = -K_ + i;
        return {1, k >= n_ ? k + 1 : k};
    }
    return {2, i - 2 * K_ - K_};
}

Eigen::VectorXcd DifferentialSystem::pack(const std::vector<cplx>& s1, const std::vector<cplx>& s2) const {
    if (int(s1.size()) != 2 * K_ + 1 || int(s2.size()) != 2 * K_ + 1) throw InputError("sigma arrays need 2K+1 entries");
    Eigen::VectorXcd x(size());
    for (int i = 0; i < size(); ++i) {
        const auto [j, k] = slot(i);
        x(i) = j == 1 ? s1[k + K_] : s2[k + K_];
    }
    return x;
}

void DifferentialSystem::unpack(const Eigen::VectorXcd& x, std::vector<cplx>& s1, std::vector<cplx>& s2) const {
    s1.assign(2 * K_ + 1, 0.0);
    s2.assign(2 * K_ + 1, 0.0);
    s1[n_ + K_] = roots_.table().tau(1, n_);
    for (int i = 0; i < size(); ++i) {
        const auto [j, k] = slot(i);
        (j == 1 ? s1 : s2)[k + K_] = x(i);
    }
}

Eigen::VectorXcd DifferentialSystem::initial() const {
    Eigen::VectorXcd x(size());
    for (int i = 0; i < size(); ++i) {
        const auto [j, k] = slot(i);
        x(i) = roots_.table().tau(j, k);
    }
    return x;
}

void DifferentialSystem::check_admissible(const Eigen::VectorXcd& x) const {
    for (int i = 0; i < size(); ++i) {
        const auto [j, k] = slot(i);
        const Disc d = family_disc(k);
        if (!(std::abs(x(i) - d.center) < d.radius))
            throw InputError(sigma_name(j, k) + " outside its isolating neighborhood");
    }
}

std::vector<int> DifferentialSystem::clamp(Eigen::VectorXcd& x) const {
    std::vector<int> moved;
    for (int i = 0; i < size(); ++i) {
        const Disc d = family_disc(slot(i).second);
        const cplx u = x(i) - d.center;
        const double r = 0.99 * d.radius;
        if (!std::isfinite(std::abs(u))) throw NumericalError("non-finite Newton iterate");
        if (std::abs(u) > r) {
            x(i) = d.center + r * u / std::abs(u);
            moved.push_back(i);
        }
    }
    return moved;
}

double DifferentialSystem::scale(int e) const {
    const auto [j, m] = slot(e);
    if (j == 1) return double(n_ - m);
    return 16.0 * pi_n(m) * pi_n(m) * pi_n(n_);
}

void DifferentialSystem::weighted_values(const Eigen::VectorXcd& x, std::vector<std::vector<cplx>>& c) const {
    std::vector<cplx> s1, s2;
    unpack(x, s1, s2);
    const Factors f = factors(s1, s2, n_, K_);
    const cplx pre = -(1.0 / pi_n(n_)) / f.inf;
    c.resize(size());
    parallel_for(0, size(), opt_.threads, [&](int e) {
        std::vector<cplx> p1, p2;
        product(f.a1, f.d1, contour_[e].z, p1);
        product(f.a2, f.d2, zeta_[e], p2);
        auto& out = c[e];
        out.resize(p1.size());
        for (size_t i = 0; i < p1.size(); ++i) out[i] = pre * p1[i] * p2[i] * inv_chip_[e][i];
    });
}

Eigen::VectorXcd DifferentialSystem::residual(const Eigen::VectorXcd& x) const {
    std::vector<std::vector<cplx>> c;
    weighted_values(x, c);
    Eigen::VectorXcd F(size());
    for (int e = 0; e < size(); ++e) {
        cplx s{};
        for (const cplx v : c[e]) s += v;
        if (!std::isfinite(std::abs(s))) throw NumericalError("non-finite residual entry");
        F(e) = scale(e) * s;
    }
    return F;
}

Eigen::MatrixXcd DifferentialSystem::jacobian(const Eigen::VectorXcd& x) const {
    std::vector<std::vector<cplx>> c;
    weighted_values(x, c);
    std::vector<cplx> s1, s2;
    unpack(x, s1, s2);
    std::vector<cplx> a1, a2(s2);
    for (int k = -K_; k <= K_; ++k)
        if (k != n_) a1.push_back(s1[k + K_]);
    const int R1 = int(a1.size()), R2 = int(a2.size());
    Eigen::MatrixXcd J(size(), size());
    parallel_for(0, size(), opt_.threads, [&](int e) {
        const int N = int(c[e].size());
        std::vector<cplx> d1(R1), d2(R2);
        // d/d sigma_{1,r}: factor 1/(sigma_{1,r} - lambda)
        kernels::cauchy_sum(a1.data(), R1, contour_[e].z.data(), c[e].data(), N, d1.data());
        // d/d sigma_{2,r}: 1/(sigma_{2,r} - zeta) - 1/sigma_{2,r}, the second from C_n
        kernels::cauchy_sum(a2.data(), R2, zeta_[e].data(), c[e].data(), N, d2.data());
        cplx total{};
        for (const cplx v : c[e]) total += v;
        const double A = scale(e);
        for (int r = 0; r < R1; ++r) J(e, r) = A * d1[r];
        for (int r = 0; r < R2; ++r) J(e, R1 + r) = A * (d2[r] - total / a2[r]);
    });
    return J;
}

cplx DifferentialSystem::f(const Eigen::VectorXcd& x, cplx lambda) const {
    std::vector<cplx> s1, s2;
    unpack(x, s1, s2);
    return psi_value(n_, K_, roots_.shift(1), roots_.shift(2), s1, s2, lambda);
}

Eigen::VectorXcd assemble_F(const DifferentialSystem& sys, const std::vector<cplx>& s1, const std::vector<cplx>& s2) {
    const auto x = sys.pack(s1, s2);
    sys.check_admissible(x);
    return sys.residual(x);
}

JacobianBlocks assemble_jacobian(const DifferentialSystem& sys, const std::vector<cplx>& s1,
                                 const std::vector<cplx>& s2) {
    const auto x = sys.pack(s1, s2);
    sys.check_admissible(x);
    JacobianBlocks b;
    b.n = sys.n();
    b.K = sys.K();
    b.Q = sys.jacobian(x);
    const int K2 = 2 * sys.K(), K3 = 2 * sys.K() + 1;
    b.Q11 = b.Q.topLeftCorner(K2, K2);
    b.Q12 = b.Q.topRightCorner(K2, K3);
    b.Q21 = b.Q.bottomLeftCorner(K3, K2);
    b.Q22 = b.Q.bottomRightCorner(K3, K3);
    b.D = b.Q.diagonal();
    Eigen::MatrixXcd off = b.Q;
    off.diagonal().setZero();
    b.offdiag_frobenius = off.norm();
    b.min_abs_diagonal = b.D.cwiseAbs().minCoeff();
    return b;
}

double jacobian_fd_check(const DifferentialSystem& sys, const Eigen::VectorXcd& x, int count, std::uint64_t seed,
                         double h) {
    const Eigen::MatrixXcd J = sys.jacobian(x);
    std::mt19937_64 g(seed);
    std::uniform_int_distribution<int> pick(0, sys.size() - 1);
    const double scale = J.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        const int r = pick(g), c = pick(g);
        Eigen::VectorXcd xp = x, xm = x;
        xp(c) += h;
        xm(c) -= h;
        const cplx fd = (sys.residual(xp)(r) - sys.residual(xm)(r)) / (2.0 * h);
        // entries far below the matrix scale are compared on that scale
        const double ref = std::max(std::abs(J(r, c)), 1e-6 * scale);
        worst = std::max(worst, std::abs(fd - J(r, c)) / ref);
    }
    return worst;
}

SigmaSolution solve_sigma(const CanonicalRoots& roots, int n, const DifferentialOptions& opt) {
    if (roots.table().N_max > opt.K) throw InputError("truncation K must be at least N_max");
    const DifferentialSystem sys(roots, n, opt);
    Eigen::VectorXcd x = sys.initial();
    Eigen::VectorXcd F = sys.residual(x);
    double norm = F.norm();
    SigmaSolution sol;
    sol.n = n;
    sol.K = opt.K;
    int it = 0;
    while (norm > opt.tol) {
        if (it == opt.max_iter) {
            std::ostringstream os;
            os << "outside solvable neighborhood: " << it << " Newton steps, residual " << norm;
            throw NumericalError(os.str());
        }
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.jacobian(x));
        const double rc = lu.rcond();
        if (!(rc * opt.max_condition >= 1.0)) {
            std::ostringstream os;
            os << "outside solvable neighborhood: Jacobian condition estimate " << 1.0 / rc;
            throw NumericalError(os.str());
        }
        const Eigen::VectorXcd dx = lu.solve(-F);
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
            Eigen::VectorXcd xt = x + t * dx;
            const auto moved = sys.clamp(xt);
            for (const int i : moved) {
                const auto [j, k] = sys.slot(i);
                std::ostringstream os;
                os << "step " << it + 1 << ": " << sigma_name(j, k) << " clamped into its disc";
                sol.log.push_back(os.str());
            }
            const Eigen::VectorXcd Ft = sys.residual(xt);
            if (Ft.norm() < norm) {
                x = xt;
                F = Ft;
                norm = Ft.norm();
                accepted = true;
                if (h > 0) sol.log.push_back("step " + std::to_string(it + 1) + ": damped by 2^-" + std::to_string(h));
                break;
            }
        }
        ++it;
        if (!accepted) {
            std::ostringstream os;
            os << "outside solvable neighborhood: no residual decrease after " << opt.max_halvings
               << " halvings, residual " << norm;
            throw NumericalError(os.str());
        }
    }
    sys.unpack(x, sol.sigma1, sol.sigma2);
    sol.residual_norm = norm;
    sol.newton_iters = it;
    const Factors f = factors(sol.sigma1, sol.sigma2, n, opt.K);
    sol.shift1 = roots.shift(1);
    sol.shift2 = roots.shift(2);
    sol.C_n = 1.0 / (f.inf * zero_tail(opt.K, 0.0, sol.shift2));
    return sol;
}

cplx eval_psi(const SigmaSolution& sol, cplx lambda) {
    return psi_value(sol.n, sol.K, sol.shift1, sol.shift2, sol.sigma1, sol.sigma2, lambda);
}

cplx eval_psi2_normalized(const SigmaSolution& sol, cplx lambda) {
    if (lambda == 0.0) throw InputError("psi_{n,2} is not defined at lambda = 0");
    const cplx zeta = -1.0 / (16.0 * lambda);
    cplx p = zero_tail(sol.K, zeta, sol.shift2);
    for (int k = -sol.K; k <= sol.K; ++k) p *= (sol.s2(k) - zeta) / pi_n(k);
    return p * sol.C_n;
}

cplx psi_negative(const SigmaSolution& reflected, cplx lambda) {
    if (lambda == 0.0) throw InputError("psi_{-n} is not defined at lambda = 0");
    return eval_psi(reflected, 1.0 / (16.0 * lambda)) / (16.0 * lambda * lambda);
}

NormalizationReport verify_normalization(const SigmaSolution& sol, const CanonicalRoots& roots, int mmax,
                                         const DifferentialOptions& opt, bool negative) {
    NormalizationReport rep;
    rep.mmax = mmax;
    rep.rho = opt.rho * opt.verify_scale;
    rep.family1.assign(2 * mmax + 1, 0.0);
    rep.family2.assign(2 * mmax + 1, 0.0);
    rep.quadrature_error.assign(2 * mmax + 1, 0.0);
    rep.target_family = negative ? 2 : 1;
    rep.target_index = negative ? -sol.n : sol.n;
    parallel_for(-mmax, mmax + 1, opt.threads, [&](int m) {
        for (int j = 1; j <= 2; ++j) {
            const auto nodes = contour_nodes(gamma_contour(roots.table(), j, m, rep.rho, opt.nodes));
            std::vector<cplx> vals(nodes.z.size());
            for (size_t i = 0; i < vals.size(); ++i) {
                const cplx z = nodes.z[i];
                vals[i] = (negative ? psi_negative(sol, z) : eval_psi(sol, z)) / roots.chip(z);
            }
            const auto r = contour_sum(nodes, vals);
            (j == 1 ? rep.family1 : rep.family2)[m + mmax] = r.value / (2.0 * pi);
            rep.quadrature_error[m + mmax] = std::max(rep.quadrature_error[m + mmax], r.error_estimate / (2.0 * pi));
        }
    });
    for (int m = -mmax; m <= mmax; ++m)
        for (int j = 1; j <= 2; ++j) {
            const cplx target = (j == rep.target_family && m == rep.target_index) ? 1.0 : 0.0;
            const cplx v = (j == 1 ? rep.family1 : rep.family2)[m + mmax];
            rep.max_deviation = std::max(rep.max_deviation, std::abs(v - target));
        }
    return rep;
}

GapConfinement gap_confinement(const SigmaSolution& sol, const SpectrumTable& t, double gamma_floor, int skip2) {
    GapConfinement g;
    double worst = -1.0;
    for (int j = 1; j <= 2; ++j)
        for (int k = -sol.K; k <= sol.K; ++k) {
            if (j == 1 && k == sol.n) continue;
            if (j == 2 && k == skip2) continue;
            const cplx s = j == 1 ? sol.s1(k) : sol.s2(k);
            const double lo = t.lam(j, k, -1).real(), hi = t.lam(j, k, +1).real();
            const double x = s.real();
            const double out = std::max({lo - x, x - hi, 0.0}) + std::abs(s.imag());
            if (out > worst) {
                worst = out;
                g.worst_family = j;
                g.worst_index = k;
            }
            g.max_violation = std::max(g.max_violation, out);
            const double gam = std::abs(t.gamma(j, k));
            const double off = std::abs(s - t.tau(j, k));
            if (gam > gamma_floor)
                g.max_root_ratio = std::max(g.max_root_ratio, off / (gam * gam));
            else
                g.max_offset_closed = std::max(g.max_offset_closed, off);
        }
    return g;
}

std::string solution_to_json(const SigmaSolution& sol, double normalization_max_dev) {
    auto arr = [](const std::vector<cplx>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const cplx z : v) a.push_back({z.real(), z.imag()});
        return a;
    };
    nlohmann::json j;
    j["n"] = sol.n;
    j["K"] = sol.K;
    j["sigma1"] = arr(sol.sigma1);
    j["sigma2"] = arr(sol.sigma2);
    j["residual"] = sol.residual_norm;
    j["iters"] = sol.newton_iters;
    j["C_n"] = {sol.C_n.real(), sol.C_n.imag()};
    j["normalization_max_dev"] = normalization_max_dev;
    return j.dump();
}

}  // namespace sgl
