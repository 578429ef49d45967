#pragma once

#include <string>
#include <vector>

#include "sgl/spectrum.hpp"

namespace sgl {

// prod_{|k| > L} (s_k + c/k - z)/pi_k for the zero-potential roots s_k = sign(k) s_|k| shifted by c/k.
// Closed by the sine product and a summed correction for (s_k + c/k)^2 - k^2 pi^2.
cplx zero_tail(int L, cplx z, cplx shift = 0.0);

// (tau - z) sqrt+(1 - gamma^2 / (4 (tau - z)^2)); analytic off the segment [tau - gamma/2, tau + gamma/2].
cplx standard_root_value(cplx tau, cplx gamma, cplx z);

// w_{1,n}(lambda) or w_{2,n}(lambda) from the table. Throws InputError within 1e-10 of a gap endpoint.
cplx standard_root(const SpectrumTable& t, int j, int n, cplx lambda);

// prod_{|k|<=K} (a_k - z)/pi_k, optionally closed by the shifted zero-potential tail.
class NodeProduct {
public:
    NodeProduct() = default;
    NodeProduct(std::vector<cplx> a, int K, bool tail, cplx shift = 0.0);
    cplx operator()(cplx z) const;
    void eval(const cplx* z, int n, cplx* out) const;
    // Product with factor k removed (no 1/pi_k either).
    cplx without(int k, cplx z) const;
    int K() const { return K_; }
    cplx node(int k) const { return a_[k + K_]; }

private:
    std::vector<cplx> a_;
    std::vector<double> inv_d_;
    int K_ = 0;
    bool tail_ = false;
    cplx shift_{};
};

class CanonicalRoots {
public:
    CanonicalRoots(const SpectrumTable& t, int K);

    // sqrt^c chi_1(lambda) = prod w_{1,k}(lambda)/pi_k
    cplx chi1(cplx lambda) const { return F(1, lambda); }
    // sqrt^c chi_2(lambda) = prod w_{2,k}(lambda)/pi_k
    cplx chi2(cplx lambda) const { return F(2, -1.0 / (16.0 * lambda)); }
    // i sqrt^c chi_1 sqrt^c chi_2 / sqrt^c chi_1(0)
    cplx chip(cplx lambda) const;
    // chip at lambda - i eps (extension to a gap from below)
    cplx chip_below(cplx lambda, double eps) const { return chip(lambda - cplx(0.0, eps)); }

    // Closed form sqrt+(l0+ l0-) prod_{m>=1} l_m+ l_m- / pi_m^2 (with the tail).
    cplx chi1_at_zero() const { return chi1_zero_; }
    cplx chi2_at_infinity() const { return chi2_inf_; }
    // Normalization used in chip: sqrt(chi1(0) chi2(inf)), equal to chi1(0) in exact arithmetic.
    cplx normalization() const { return D_; }

    // f_{1,n}(lambda) = (1/pi_n) prod_{m != n} w_{1,m}(lambda)/pi_m
    cplx f1n(int n, cplx lambda) const;
    // family j product evaluated at the family variable z (lambda for j = 1, -1/(16 lambda) for j = 2)
    cplx F(int j, cplx z) const;

    const SpectrumTable& table() const { return t_; }
    int K() const { return K_; }
    // tail shift of family j
    cplx shift(int j) const { return shift_[j - 1]; }

private:
    SpectrumTable t_;
    int K_;
    std::vector<cplx> tau_[2], gam_[2];
    cplx shift_[2]{};
    cplx chi1_zero_{}, chi2_inf_{}, D_{};
};

struct ProductSample {
    cplx lambda{};
    double res_delta_dot = 0.0, res_chi_D = 0.0, res_chi_p = 0.0;
};

struct ProductReport {
    int K = 0;
    std::vector<ProductSample> samples;
    double max_delta_dot = 0.0, max_chi_D = 0.0, max_chi_p = 0.0;
    // truncated constraint products, expected to tend to 1
    cplx constraint_delta_dot{}, constraint_dirichlet{}, constraint_periodic{};
    // Dirichlet product weighted by e^{+q(0)} instead of e^{-q(0)}; differs from 1 by e^{2 q(0)} - 1
    cplx constraint_dirichlet_plus{};
    double max_residual() const;
};

// Relative residuals between monodromy values and truncated product formulas at the sample points.
ProductReport verify_product_reps(const Potential& v, const SpectrumTable& t, int K, const std::vector<cplx>& lambdas,
                                  double tol = 1e-12);
// Default off-gap sample set (10 points).
std::vector<cplx> product_sample_points();

// Truncated constraint identities at K. The Dirichlet one is e^{-q(0)} 16 mu_0^2 prod (mu_n 16 mu_{-n})^2,
// the sign consistent with chi_D(lambda, q, p) = e^{q(0)} chi_D(-1/(16 lambda), -q, p).
cplx constraint_delta_dot(const SpectrumTable& t, int K);
cplx constraint_dirichlet(const SpectrumTable& t, int K, cplx q0);
cplx constraint_periodic(const SpectrumTable& t, int K);

struct SignViolation {
    std::string rule;
    int n = 0;
    cplx lambda{};
    cplx value{};
};

struct SignReport {
    int checked = 0, skipped = 0;
    std::vector<SignViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Sign-table checks for real potentials on sampled real lambda.
SignReport sign_tables(const CanonicalRoots& roots, int nmax, int samples_per_interval = 3);

// Node family for the interpolation identity.
struct NodeFamily {
    int K = 0;
    std::vector<cplx> sigma1, sigma2;  // index k + K
    cplx s1(int k) const { return sigma1[k + K]; }
    cplx s2(int k) const { return sigma2[k + K]; }
    cplx kappa(int k) const { return -1.0 / (16.0 * s2(k)); }
};

// Finite products f1 = prod (sigma_{1,k} - lambda)/pi_k, f2 = prod (sigma_{2,k} + 1/(16 lambda))/pi_k.
cplx family_f1(const NodeFamily& nf, cplx lambda);
cplx family_f2(const NodeFamily& nf, cplx lambda);
cplx family_f2_inf(const NodeFamily& nf);

// Residue sum over |n| <= K. phi1[k+K] = phi(sigma_{1,k}), phi2[k+K] = phi(kappa_{2,k}).
cplx interpolate_reconstruct(const NodeFamily& nf, const std::vector<cplx>& phi1, const std::vector<cplx>& phi2,
                             cplx z);

// r_m = w_{1,m}(c_m)(-i sin omega(c_m)) / (chip(c_m)(pi_m - omega(c_m))) at c_m = m pi, m = 1..mmax.
std::vector<double> ratio_asymptotics(const CanonicalRoots& roots, int mmax);
// sup over Gamma_{1,n} of |prod_{m != n} (sigma_m - lambda)/w_{1,m}(lambda) - 1| for n = 0..nmax.
std::vector<double> product_ratio_bound(const CanonicalRoots& roots, const std::vector<cplx>& sigma1, int nmax,
                                        int nodes = 32);

}  // namespace sgl
