#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sgl/monodromy.hpp"
#include "sgl/quadrature.hpp"
#include "sgl/spectrum.hpp"

namespace sgl {

// L^2 gradient as a functional on directions (q', p'):
//   dF = int_0^1 q * q' + qx * d_x q' + p * P(p') dx + ev0 * q'(0)
// with the real (non-conjugated) pairing. Samples live on a composite Gauss-Legendre rule.
struct GradientKernel {
    std::vector<double> x, w;
    std::vector<cplx> q, qx, p;
    cplx ev0{};

    cplx pair(const Potential& dir) const;
    // Largest sample magnitude over all parts (ev0 included).
    double max_abs() const;
    // L^2 norm of (q, p) parts.
    double l2_norm() const;
    // int q(x) cos(2 pi n x) dx
    cplx project_q_cos(int n) const;
};

GradientKernel operator+(const GradientKernel& a, const GradientKernel& b);
GradientKernel operator*(cplx s, const GradientKernel& a);

// Gauss-Legendre grid resolving oscillations at lambda.
LineRule kernel_grid(cplx lambda);

// M(x) recorded on the kernel grid for one lambda.
struct PathSample {
    MonodromyResult mono;
    LineRule rule;
    std::vector<Mat2> M;             // M(x_i)
    std::vector<cplx> eq, emq;       // e^{q(x_i)}, e^{-q(x_i)}
};
PathSample sample_path(const Potential& v, cplx lambda, double tol = 1e-13);

enum class QForm { Boundary, Derivative };

// Gradients of the four entries of M(1, lambda). Boundary form: q part with the EV_0 term
// (1/2) offdiag(m2, -m3); Derivative form: coefficient of d_x q' and of q'.
struct MonodromyGradient {
    MonodromyResult mono;
    std::array<GradientKernel, 4> entry;  // m1, m2, m3, m4
};
MonodromyGradient grad_monodromy(const Potential& v, cplx lambda, QForm form = QForm::Boundary, double tol = 1e-13);
MonodromyGradient grad_monodromy(const PathSample& ps, QForm form = QForm::Boundary);

// Explicit polynomial kernels in the entries of M(x) and M(1).
GradientKernel grad_discriminant(const Potential& v, cplx lambda, double tol = 1e-13);
GradientKernel grad_antidiscriminant(const Potential& v, cplx lambda, double tol = 1e-13);
GradientKernel grad_discriminant(const PathSample& ps);
GradientKernel grad_antidiscriminant(const PathSample& ps);

// Grad{f}{lambda}: q part lambda/2 (f2^2 - f1^2) + (f2^2 e^q - f1^2 e^{-q})/(32 lambda), p part -f1 f2 / 2.
GradientKernel grad_expression(const PathSample& ps, const std::vector<cplx>& f1, const std::vector<cplx>& f2);
// Grad of the solution M(x) a.
GradientKernel grad_expression(const PathSample& ps, cplx a1, cplx a2);

// Dirichlet eigenvalue: (m1(mu)/chi_D'(mu)) Grad{M_2}{mu}.
GradientKernel grad_dirichlet_at(const Potential& v, cplx mu, double tol = 1e-13);
GradientKernel grad_dirichlet(const Potential& v, int n, const SpectrumOptions& opt = {});

enum class PeriodicForm { Chain, Eigenfunction };
// Simple periodic eigenvalue: -dDelta/Delta' (Chain) or the eigenfunction form.
GradientKernel grad_periodic_at(const Potential& v, cplx lambda, PeriodicForm form = PeriodicForm::Eigenfunction,
                                double tol = 1e-13);
// which = +1 for lambda_n^+, -1 for lambda_n^-.
GradientKernel grad_periodic(const Potential& v, int n, int which, const SpectrumOptions& opt = {});

// Gradient of m4(lambda) at a Dirichlet eigenvalue, lambda held fixed.
GradientKernel grad_m4_at_dirichlet_at(const Potential& v, cplx mu, double tol = 1e-13);
GradientKernel grad_m4_at_dirichlet(const Potential& v, int n, const SpectrumOptions& opt = {});

// ---- finite differences ----

// Monodromy with uniform steps fine enough for lambda; smooth in v. The step count follows ref
// (default lambda), so root finders keep one discretization while lambda moves.
MonodromyResult integrate_fixed(const Potential& v, cplx lambda, cplx ref = 0.0);
// Newton on Delta(lambda) = sigma (sigma = +-1) resp. m2(lambda) = 0 from a nearby start, fixed-step monodromy.
cplx newton_periodic(const Potential& v, cplx start, cplx sigma);
cplx newton_dirichlet(const Potential& v, cplx start);

struct FDCheck {
    std::string quantity;
    int n = 0;
    int direction = 0;
    cplx analytic{}, fd{};
    double rel_err = 0.0;  // at eps
    // observed order log10(err(e)/err(e/10)) over the decade [e/10, e] actually used
    double order_eps = 0.0, err_order_hi = 0.0, err_order_lo = 0.0, order = 0.0;
    bool saturated = false;  // no candidate decade had its lower error clear of rounding noise
    bool absolute = false;   // analytic value below zero_floor; errors are absolute
    bool exact = false;      // absolute, and zero to zero_floor at every step: order not observable
    bool pass = false;
};

struct FDOptions {
    double eps = 1e-4;
    // Upper ends of candidate decades for the order estimate. At eps <= 1e-3 the O(eps^2) term
    // often sits below rounding noise; the first decade whose lower error exceeds noise_margin
    // times the noise floor is used, else the last one.
    std::vector<double> order_decades{3e-2, 1e-1, 3e-1};
    double noise_margin = 30.0;
    double min_order = 1.9;
    double max_rel = 1e-5;
    double zero_floor = 1e-12;
};

FDCheck fd_check(const std::string& quantity, int n, int direction, const GradientKernel& k, const Potential& v,
                 const Potential& dir, const std::function<cplx(const Potential&)>& f, const FDOptions& opt = {},
                 std::map<double, cplx>* cache = nullptr);

// Directions derived from one seed.
std::vector<Potential> fd_directions(std::uint64_t seed, int count, int Kf = 4);

struct GradientSuiteOptions {
    cplx lambda{1.7, 0.0};
    std::vector<int> dirichlet_n{0, 1};
    std::vector<int> periodic_n{1};
    int directions = 3;
    std::uint64_t seed = 0;
    FDOptions fd;
    SpectrumOptions spectrum;
};
// FD checks for every kernel family.
std::vector<FDCheck> gradient_fd_suite(const Potential& v, const GradientSuiteOptions& opt = {});

}  // namespace sgl
