#include "sgl/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace sgl {

ContourNodes contour_nodes(const ContourSpec& c) {
    if (c.nodes < 2 || !(c.radius > 0.0)) throw InputError("contour needs radius > 0 and at least 2 nodes");
    ContourNodes out;
    out.z.resize(c.nodes);
    out.w.resize(c.nodes);
    const double h = 2.0 * pi / c.nodes;
    for (int j = 0; j < c.nodes; ++j) {
        const cplx e = std::polar(1.0, h * j);
        const cplx zeta = c.center + c.radius * e;
        const cplx dzeta = I * c.radius * e * h;
        if (c.plane == ContourSpec::Plane::Lambda) {
            out.z[j] = zeta;
            out.w[j] = dzeta;
        } else {
            if (std::abs(zeta) == 0.0) throw InputError("mu contour passes through 0");
            out.z[j] = -1.0 / (16.0 * zeta);
            out.w[j] = dzeta / (16.0 * zeta * zeta);
        }
    }
    return out;
}

IntegralResult contour_sum(const ContourNodes& nodes, const std::vector<cplx>& values) {
    IntegralResult r;
    cplx even{};
    for (size_t j = 0; j < values.size(); ++j) {
        if (!std::isfinite(values[j].real()) || !std::isfinite(values[j].imag())) {
            std::ostringstream os;
            os << "non-finite integrand at node " << j << " (lambda = " << nodes.z[j] << ")";
            throw NumericalError(os.str());
        }
        const cplx t = nodes.w[j] * values[j];
        r.value += t;
        if (j % 2 == 0) even += 2.0 * t;
    }
    r.error_estimate = values.size() % 2 == 0 ? std::abs(r.value - even) : 0.0;
    return r;
}

IntegralResult contour_integral(const std::function<cplx(cplx)>& g, const ContourSpec& c) {
    const auto nodes = contour_nodes(c);
    std::vector<cplx> vals(nodes.z.size());
    for (size_t j = 0; j < vals.size(); ++j) vals[j] = g(nodes.z[j]);
    return contour_sum(nodes, vals);
}

RootCount count_roots(const ContourNodes& nodes, const std::vector<cplx>& f, const std::vector<cplx>& fp,
                      double floor) {
    RootCount rc;
    rc.min_abs_f = INFINITY;
    cplx s{};
    for (size_t j = 0; j < f.size(); ++j) {
        rc.min_abs_f = std::min(rc.min_abs_f, std::abs(f[j]));
        s += nodes.w[j] * fp[j] / f[j];
    }
    if (rc.min_abs_f < floor) throw NumericalError("function nearly vanishes on the contour");
    rc.raw = s / (2.0 * pi * I);
    rc.count = int(std::lround(rc.raw.real()));
    rc.distance = std::abs(rc.raw - cplx(rc.count));
    if (rc.distance > 0.2) throw NumericalError("contour too coarse or root on contour");
    return rc;
}

RootCount count_roots(const std::function<void(cplx, cplx&, cplx&)>& f, const ContourSpec& c, double floor) {
    const auto nodes = contour_nodes(c);
    std::vector<cplx> fv(nodes.z.size()), fpv(nodes.z.size());
    for (size_t j = 0; j < fv.size(); ++j) f(nodes.z[j], fv[j], fpv[j]);
    return count_roots(nodes, fv, fpv, floor);
}

std::vector<cplx> root_moments(const ContourNodes& nodes, const std::vector<cplx>& f, const std::vector<cplx>& fp,
                               int kmax, cplx shift) {
    std::vector<cplx> m(kmax + 1);
    for (size_t j = 0; j < f.size(); ++j) {
        const cplx r = nodes.w[j] * fp[j] / f[j];
        cplx p = 1.0;
        for (int k = 0; k <= kmax; ++k) {
            m[k] += p * r;
            p *= nodes.z[j] - shift;
        }
    }
    for (auto& x : m) x /= 2.0 * pi * I;
    return m;
}

LineRule gauss_legendre(int panels, int order) {
    if (panels < 1 || order < 1 || order > 64) throw InputError("bad Gauss-Legendre parameters");
    // nodes on [-1, 1] by Newton on P_order, starting from the Chebyshev guess
    std::vector<double> t(order), wt(order);
    for (int i = 0; i < order; ++i) {
        double z = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) p0 = 1.0, p1 = z;
            dp = order * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        t[order - 1 - i] = z;
        wt[order - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    LineRule r;
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p)
        for (int i = 0; i < order; ++i) {
            r.x.push_back(h * (p + 0.5 * (t[i] + 1.0)));
            r.w.push_back(0.5 * h * wt[i]);
        }
    return r;
}

}  // namespace sgl
