#pragma once

#include <functional>
#include <vector>

#include "sgl/types.hpp"

namespace sgl {

// Circle traversed counterclockwise. In the Mu plane the circle lives in
// mu = -1/(16 lambda) and is mapped back to lambda.
struct ContourSpec {
    enum class Plane { Lambda, Mu };
    cplx center{};
    double radius = 1.0;
    int nodes = 64;
    Plane plane = Plane::Lambda;

    static ContourSpec circle(cplx c, double r, int n = 64) { return {c, r, n, Plane::Lambda}; }
    static ContourSpec mu_circle(cplx c, double r, int n = 64) { return {c, r, n, Plane::Mu}; }
};

// Quadrature nodes in the lambda plane with weights so that
// sum_j w_j g(z_j) approximates the contour integral of g(lambda) d lambda.
struct ContourNodes {
    std::vector<cplx> z;
    std::vector<cplx> w;
};

ContourNodes contour_nodes(const ContourSpec& c);

struct IntegralResult {
    cplx value{};
    double error_estimate = 0.0;  // |I_N - I_{N/2}| from the even subset
};

// Trapezoidal rule on the circle; the error estimate reuses the even nodes.
IntegralResult contour_integral(const std::function<cplx(cplx)>& g, const ContourSpec& c);

IntegralResult contour_sum(const ContourNodes& nodes, const std::vector<cplx>& values);

struct RootCount {
    int count = 0;
    double distance = 0.0;  // |raw - count|
    cplx raw{};
    double min_abs_f = 0.0;
};

// Winding number (1/2 pi i) * contour integral of f'/f from node samples of f and f'.
RootCount count_roots(const ContourNodes& nodes, const std::vector<cplx>& f, const std::vector<cplx>& fp,
                      double floor = 1e-8);
RootCount count_roots(const std::function<void(cplx, cplx&, cplx&)>& f, const ContourSpec& c,
                      double floor = 1e-8);

// (1/2 pi i) * contour integral of (lambda - shift)^k f'/f, k = 0..kmax.
std::vector<cplx> root_moments(const ContourNodes& nodes, const std::vector<cplx>& f, const std::vector<cplx>& fp,
                               int kmax, cplx shift);

// Composite Gauss-Legendre rule on [0, 1]: `panels` equal panels of `order` nodes each, x increasing.
struct LineRule {
    std::vector<double> x, w;
};
LineRule gauss_legendre(int panels, int order);

}  // namespace sgl
