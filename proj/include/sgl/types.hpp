#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sgl {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Error categories map onto the CLI exit codes.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// pi_n = n*pi for n != 0, pi_0 = 1
inline double pi_n(int n) { return n == 0 ? 1.0 : n * pi; }

// Row-major 2x2 complex matrix: (m1 m2; m3 m4).
struct Mat2 {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static Mat2 identity() { return {}; }
    static Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }

    cplx det() const { return a * d - b * c; }
    // Inverse for det = 1 matrices (Wronskian identity).
    Mat2 inv_unimodular() const { return {d, -b, -c, a}; }
    Mat2 inv() const {
        const cplx D = det();
        return {d / D, -b / D, -c / D, a / D};
    }
};

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
inline Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}
inline Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
}
inline Mat2 operator*(cplx s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }

inline double max_abs(const Mat2& x) {
    return std::max(std::max(std::abs(x.a), std::abs(x.b)), std::max(std::abs(x.c), std::abs(x.d)));
}

// omega(lambda) = lambda - 1/(16 lambda)
inline cplx omega(cplx lam) { return lam - 1.0 / (16.0 * lam); }

// E_nu(x) = (cos nu x, sin nu x; -sin nu x, cos nu x)
inline Mat2 rotation(cplx nu, double x) {
    const cplx c = std::cos(nu * x), s = std::sin(nu * x);
    return {c, s, -s, c};
}

// Order on C+: modulus first, then imaginary part.
inline bool precedes(cplx a, cplx b, double tie = 1e-12) {
    const double ra = std::abs(a), rb = std::abs(b);
    if (std::abs(ra - rb) > tie * std::max(1.0, std::max(ra, rb))) return ra < rb;
    return a.imag() <= b.imag();
}

// Principal square root with non-negative real part.
inline cplx sqrt_plus(cplx z) { return std::sqrt(z); }

}  // namespace sgl
