#pragma once

#include <cstdint>

#include <string>
#include <vector>

#include "sgl/types.hpp"

namespace sgl {

// Trigonometric series sum_k c_k e^{2 pi i k x}, k = -K..K.
struct TrigSeries {
    int K = 0;
    std::vector<cplx> c;  // index k + K

    cplx operator()(double x) const;
    cplx coeff(int k) const { return (k < -K || k > K) ? cplx{} : c[k + K]; }
};

// Cached coefficient fields entering the Lax operator.
struct LaxFields {
    TrigSeries a;    // P p + q_x
    TrigSeries ep;   // e^{q}
    TrigSeries em;   // e^{-q}

    void eval(double x, cplx& av, cplx& epv, cplx& emv) const;
};

struct FieldSamples {
    std::vector<double> x;
    std::vector<cplx> q, qx, Pp, exp_q, exp_mq;
};

// Periodic pair v = (q, p) on the unit torus, band limited to |k| <= Kf.
class Potential {
public:
    Potential() : Potential(false, 0, {cplx{}}, {cplx{}}, 64) {}
    Potential(bool real, int Kf, std::vector<cplx> q, std::vector<cplx> p, int grid = 64);

    static Potential zero(int grid = 64) { return Potential(true, 0, {cplx{}}, {cplx{}}, grid); }
    // q = a cos(2 pi m x) + b, p = c cos(2 pi m x)
    static Potential cosine(double a, int m = 1, double c = 0.0, double b = 0.0, int grid = 64);
    // Real trig polynomial of degree 3 in q and p with amplitudes ~0.05/k, 0.03/k and random phases.
    static Potential seeded(std::uint64_t seed, int grid = 64);
    // Real direction of degree Kf with unit H^1 norm (q and p parts together).
    static Potential random_direction(std::uint64_t seed, int Kf = 4, int grid = 64);

    bool real() const { return real_; }
    int Kf() const { return Kf_; }
    int grid() const { return grid_; }
    cplx q_coeff(int k) const { return (k < -Kf_ || k > Kf_) ? cplx{} : q_[k + Kf_]; }
    cplx p_coeff(int k) const { return (k < -Kf_ || k > Kf_) ? cplx{} : p_[k + Kf_]; }
    const std::vector<cplx>& q_coeffs() const { return q_; }
    const std::vector<cplx>& p_coeffs() const { return p_; }

    cplx q(double x) const;
    cplx qx(double x) const;
    cplx Pp(double x) const;
    cplx p(double x) const;

    const LaxFields& lax() const { return lax_; }
    FieldSamples eval_fields() const;

    // (q, p) -> (-q, p)
    Potential reflected() const;
    // v + eps * w (coefficient-wise, bands merged)
    Potential axpy(double eps, const Potential& w) const;
    double l2_norm_coeffs() const;

private:
    void build_fields();

    bool real_;
    int Kf_;
    std::vector<cplx> q_, p_;
    int grid_;
    LaxFields lax_;
};

// Symbol of P = sqrt(1 - d_x^2) at frequency k.
inline double P_symbol(int k) { return std::sqrt(1.0 + 4.0 * pi * pi * double(k) * double(k)); }

std::string potential_to_json(const Potential& v);
Potential potential_from_json(const std::string& text);
Potential load_potential(const std::string& path);

}  // namespace sgl
