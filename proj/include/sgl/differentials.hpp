#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgl/roots_products.hpp"

namespace sgl {

struct DifferentialOptions {
    int K = 16;                 // unknowns sigma_{j,k} for |k| <= K
    double rho = 0.45;          // solver contour radius as a fraction of the disc radius
    double verify_scale = 1.5;  // fresh contours use rho * verify_scale
    int nodes = 64;
    double tol = 1e-9;          // Newton stops once the residual 2-norm is below this
    int max_iter = 20;
    int max_halvings = 6;
    double max_condition = 1e12;
    int threads = 1;
};

struct SigmaSolution {
    int n = 0;
    int K = 0;
    // index k + K. sigma1[n + K] holds the pinned value tau_{1,n}.
    std::vector<cplx> sigma1, sigma2;
    double residual_norm = 0.0;
    int newton_iters = 0;
    cplx C_n{};
    // tail shifts of the frozen sigma beyond K (sigma_{j,k} = tau_{j,k}(0) + shift_j / k)
    cplx shift1{}, shift2{};
    std::vector<std::string> log;

    cplx s1(int k) const { return sigma1[k + K]; }
    cplx s2(int k) const { return sigma2[k + K]; }
};

// Isolating disc of index m in the family plane (lambda for j = 1, -1/(16 lambda) for j = 2).
Disc family_disc(int m);

// F^n restricted to |m| <= K, with contour data and 1/sqrt^c chi_p precomputed.
// Unknown and equation order: sigma_{1,k} (k != n) by increasing k, then sigma_{2,k}.
class DifferentialSystem {
public:
    DifferentialSystem(const CanonicalRoots& roots, int n, const DifferentialOptions& opt);

    int n() const { return n_; }
    int K() const { return K_; }
    int size() const { return 4 * K_ + 1; }
    // (family, index) of unknown / equation slot i
    std::pair<int, int> slot(int i) const;

    Eigen::VectorXcd pack(const std::vector<cplx>& sigma1, const std::vector<cplx>& sigma2) const;
    void unpack(const Eigen::VectorXcd& x, std::vector<cplx>& sigma1, std::vector<cplx>& sigma2) const;
    Eigen::VectorXcd initial() const;  // tau values

    // Throws InputError naming the first sigma outside its isolating disc.
    void check_admissible(const Eigen::VectorXcd& x) const;
    // Pulls sigma back inside 0.99 of its disc radius; returns the moved slots.
    std::vector<int> clamp(Eigen::VectorXcd& x) const;

    Eigen::VectorXcd residual(const Eigen::VectorXcd& x) const;
    Eigen::MatrixXcd jacobian(const Eigen::VectorXcd& x) const;

    // f_n(lambda) = -(1/pi_n) f_{n,1}(lambda) f_{n,2}(lambda) / f_{n,2}(infinity)
    cplx f(const Eigen::VectorXcd& x, cplx lambda) const;

    const CanonicalRoots& roots() const { return roots_; }

private:
    // c_i = w_i f_n(z_i) / chip(z_i) on contour e
    void weighted_values(const Eigen::VectorXcd& x, std::vector<std::vector<cplx>>& c) const;
    double scale(int e) const;

    CanonicalRoots roots_;
    int n_, K_;
    DifferentialOptions opt_;
    std::vector<ContourNodes> contour_;
    std::vector<std::vector<cplx>> inv_chip_, zeta_;
};

struct JacobianBlocks {
    int n = 0, K = 0;
    Eigen::MatrixXcd Q;                 // full (4K+1)^2 matrix
    Eigen::MatrixXcd Q11, Q12, Q21, Q22;
    Eigen::VectorXcd D;                 // diagonal of Q
    double offdiag_frobenius = 0.0;     // Frobenius norm of Q - diag(D)
    double min_abs_diagonal = 0.0;
};

Eigen::VectorXcd assemble_F(const DifferentialSystem& sys, const std::vector<cplx>& sigma1,
                            const std::vector<cplx>& sigma2);
JacobianBlocks assemble_jacobian(const DifferentialSystem& sys, const std::vector<cplx>& sigma1,
                                 const std::vector<cplx>& sigma2);

// Largest relative deviation between analytic and central-difference Jacobian entries
// over `count` entries drawn from `seed`.
double jacobian_fd_check(const DifferentialSystem& sys, const Eigen::VectorXcd& x, int count, std::uint64_t seed,
                         double h = 1e-6);

// Damped Newton from the tau values. Throws NumericalError outside the solvable neighborhood.
SigmaSolution solve_sigma(const CanonicalRoots& roots, int n, const DifferentialOptions& opt = {});

// psi_n(lambda) = -(1/pi_n) C_n psi_{n,1}(lambda) psi_{n,2}(lambda)
cplx eval_psi(const SigmaSolution& sol, cplx lambda);
// psi_{n,2}(lambda) C_n, tending to 1 as lambda -> infinity
cplx eval_psi2_normalized(const SigmaSolution& sol, cplx lambda);

// psi_{-n}(lambda, q, p) = psi_n(1/(16 lambda), -q, p) / (16 lambda^2) from a solution at (-q, p).
cplx psi_negative(const SigmaSolution& reflected, cplx lambda);

struct NormalizationReport {
    int mmax = 0;
    double rho = 0.0;
    // (1/2 pi) of the contour integral of psi / sqrt^c chi_p over Gamma_{j,m}, index m + mmax
    std::vector<cplx> family1, family2;
    std::vector<double> quadrature_error;  // node-halving estimate, max over both families per m
    int target_family = 1, target_index = 0;
    double max_deviation = 0.0;
};

// Normalization integrals on contours of radius rho * verify_scale. `roots` belongs to the potential at which
// psi is evaluated; for psi_{-n} pass the original potential and set negative = true.
NormalizationReport verify_normalization(const SigmaSolution& sol, const CanonicalRoots& roots, int mmax,
                                         const DifferentialOptions& opt = {}, bool negative = false);

struct GapConfinement {
    double max_violation = 0.0;  // distance outside the gap hull
    double max_root_ratio = 0.0; // max |sigma - tau| / gamma^2 over open gaps
    double max_offset_closed = 0.0;  // max |sigma - tau| where gamma is below gamma_floor
    int worst_family = 0, worst_index = 0;
};
// For real potentials: sigma_{j,k} against [lambda_{j,k}^-, lambda_{j,k}^+]. Skips (2, skip2) if given.
GapConfinement gap_confinement(const SigmaSolution& sol, const SpectrumTable& t, double gamma_floor = 1e-9,
                               int skip2 = 1 << 30);

std::string solution_to_json(const SigmaSolution& sol, double normalization_max_dev);

}  // namespace sgl
