#pragma once

#include <vector>

#include "sgl/potential.hpp"
#include "sgl/types.hpp"

namespace sgl {

struct MonodromyResult {
    cplx lambda{};
    Mat2 M;    // M(1, lambda)
    Mat2 Md;   // d/dlambda M(1, lambda)
    Mat2 Mdd;  // second lambda derivative (only if requested)
    cplx Delta{}, delta{}, Delta_dot{}, Delta_ddot{};
    cplx xi_plus{}, xi_minus{};
    long steps = 0;
    std::vector<double> path_x;
    std::vector<Mat2> path;  // M(x_i, lambda) at path_x

    cplx chi_p() const { return Delta * Delta - 1.0; }
    cplx chi_p_dot() const { return 2.0 * Delta * Delta_dot; }
    cplx chi_D() const { return M.b; }
    cplx chi_D_dot() const { return Md.b; }
};

struct IntegratorOptions {
    double tol = 1e-11;
    bool second_derivative = false;
    // x positions in (0, 1] at which M(x) is recorded; steps land on them exactly
    const std::vector<double>* record_x = nullptr;
    long max_steps = 4000000;
    // > 0: uniform steps of 1/fixed_steps without error control (smooth dependence on v for finite differences)
    int fixed_steps = 0;
};

// Working annulus for the spectral parameter.
inline constexpr double lambda_min = 1e-8;
inline constexpr double lambda_max = 1e8;

MonodromyResult integrate(const Potential& v, cplx lambda, const IntegratorOptions& opt = {});

// Zero potential: M(x) = E_omega(x).
MonodromyResult closed_form_zero(cplx lambda);

cplx chi_p(const Potential& v, cplx lambda, double tol = 1e-11);
cplx chi_D(const Potential& v, cplx lambda, double tol = 1e-11);

}  // namespace sgl
