#include "sgl/potential.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "sgl/json_io.hpp"

namespace sgl {

cplx TrigSeries::operator()(double x) const {
    if (K == 0) return c[0];
    const cplx z = std::polar(1.0, 2.0 * pi * x);
    const cplx zi = std::conj(z);
    cplx s = c[K], zp = z, zm = zi;
    for (int k = 1; k <= K; ++k) {
        s += c[K + k] * zp + c[K - k] * zm;
        zp *= z;
        zm *= zi;
    }
    return s;
}

void LaxFields::eval(double x, cplx& av, cplx& epv, cplx& emv) const {
    const int K = std::max(a.K, std::max(ep.K, em.K));
    const cplx z = std::polar(1.0, 2.0 * pi * x);
    const cplx zi = std::conj(z);
    av = a.c[a.K];
    epv = ep.c[ep.K];
    emv = em.c[em.K];
    cplx zp = z, zm = zi;
    for (int k = 1; k <= K; ++k) {
        if (k <= a.K) av += a.c[a.K + k] * zp + a.c[a.K - k] * zm;
        if (k <= ep.K) epv += ep.c[ep.K + k] * zp + ep.c[ep.K - k] * zm;
        if (k <= em.K) emv += em.c[em.K + k] * zp + em.c[em.K - k] * zm;
        zp *= z;
        zm *= zi;
    }
}

namespace {

void check_finite(const std::vector<cplx>& v, const char* name) {
    for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InputError(std::string("non-finite Fourier coefficient in ") + name);
}

// Coefficients of a smooth periodic function from samples, trimmed to the
// significant band.
TrigSeries series_from_samples(const std::vector<cplx>& f) {
    const int N = int(f.size());
    const int Kmax = N / 2 - 1;
    std::vector<cplx> c(2 * Kmax + 1);
    double cmax = 0.0;
    for (int k = -Kmax; k <= Kmax; ++k) {
        cplx s{};
        for (int j = 0; j < N; ++j) s += f[j] * std::polar(1.0, -2.0 * pi * double(k) * j / N);
        c[k + Kmax] = s / double(N);
        cmax = std::max(cmax, std::abs(c[k + Kmax]));
    }
    int K = 0;
    for (int k = Kmax; k >= 1; --k)
        if (std::abs(c[Kmax + k]) > 2e-15 * cmax || std::abs(c[Kmax - k]) > 2e-15 * cmax) {
            K = k;
            break;
        }
    TrigSeries s;
    s.K = K;
    s.c.assign(c.begin() + (Kmax - K), c.begin() + (Kmax + K + 1));
    return s;
}

}  // namespace

Potential::Potential(bool real, int Kf, std::vector<cplx> q, std::vector<cplx> p, int grid)
    : real_(real), Kf_(Kf), q_(std::move(q)), p_(std::move(p)), grid_(grid) {
    if (Kf_ < 0) throw InputError("Kf must be non-negative");
    if (int(q_.size()) != 2 * Kf_ + 1 || int(p_.size()) != 2 * Kf_ + 1)
        throw InputError("expected 2*Kf+1 coefficients for q and p");
    check_finite(q_, "q");
    check_finite(p_, "p");
    if (grid_ < 4 * std::max(Kf_, 1)) throw InputError("grid must be at least 4*Kf");
    if (real_) {
        for (int k = 0; k <= Kf_; ++k) {
            if (std::abs(q_[Kf_ + k] - std::conj(q_[Kf_ - k])) > 1e-14 ||
                std::abs(p_[Kf_ + k] - std::conj(p_[Kf_ - k])) > 1e-14)
                throw InputError("real potential needs conjugate-symmetric coefficients");
        }
    }
    build_fields();
}

Potential Potential::cosine(double a, int m, double c, double b, int grid) {
    const int Kf = std::max(m, 0);
    std::vector<cplx> q(2 * Kf + 1), p(2 * Kf + 1);
    q[Kf] += b;
    if (m == 0) {
        q[Kf] += a;
        p[Kf] += c;
    } else {
        q[Kf + m] += a / 2;
        q[Kf - m] += a / 2;
        p[Kf + m] += c / 2;
        p[Kf - m] += c / 2;
    }
    return Potential(true, Kf, q, p, std::max(grid, 4 * std::max(Kf, 1)));
}

namespace {

// Portable uniform on [0, 1): top 53 bits of the engine output.
double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

}  // namespace

Potential Potential::seeded(std::uint64_t seed, int grid) {
    std::mt19937_64 g(seed);
    const int Kf = 3;
    std::vector<cplx> q(2 * Kf + 1), p(2 * Kf + 1);
    for (int k = 1; k <= Kf; ++k) {
        const double aq = 0.05 / k * (0.5 + uniform01(g)), fq = 2.0 * pi * uniform01(g);
        const double ap = 0.03 / k * (0.5 + uniform01(g)), fp = 2.0 * pi * uniform01(g);
        q[Kf + k] = 0.5 * std::polar(aq, fq);
        q[Kf - k] = std::conj(q[Kf + k]);
        p[Kf + k] = 0.5 * std::polar(ap, fp);
        p[Kf - k] = std::conj(p[Kf + k]);
    }
    return Potential(true, Kf, q, p, grid);
}

Potential Potential::random_direction(std::uint64_t seed, int Kf, int grid) {
    std::mt19937_64 g(seed);
    std::vector<cplx> q(2 * Kf + 1), p(2 * Kf + 1);
    q[Kf] = uniform01(g) - 0.5;
    p[Kf] = uniform01(g) - 0.5;
    for (int k = 1; k <= Kf; ++k) {
        q[Kf + k] = cplx(uniform01(g) - 0.5, uniform01(g) - 0.5) / double(k);
        q[Kf - k] = std::conj(q[Kf + k]);
        p[Kf + k] = cplx(uniform01(g) - 0.5, uniform01(g) - 0.5) / double(k);
        p[Kf - k] = std::conj(p[Kf + k]);
    }
    // H^1 norm^2 = sum (1 + 4 pi^2 k^2) |c_k|^2 over both components
    double n2 = 0.0;
    for (int k = -Kf; k <= Kf; ++k) n2 += (1.0 + 4.0 * pi * pi * k * k) * (std::norm(q[Kf + k]) + std::norm(p[Kf + k]));
    const double s = 1.0 / std::sqrt(n2);
    for (auto& c : q) c *= s;
    for (auto& c : p) c *= s;
    return Potential(true, Kf, q, p, std::max(grid, 4 * Kf));
}

void Potential::build_fields() {
    TrigSeries a;
    a.K = Kf_;
    a.c.resize(2 * Kf_ + 1);
    for (int k = -Kf_; k <= Kf_; ++k)
        a.c[k + Kf_] = P_symbol(k) * p_[k + Kf_] + cplx(0.0, 2.0 * pi * k) * q_[k + Kf_];
    lax_.a = a;

    int N = 64;
    while (N < std::max(grid_, 16 * (Kf_ + 1))) N *= 2;
    double qmax = 0.0;
    for (const auto& c : q_) qmax += std::abs(c);
    while (N < 4096 && N < 8.0 * (Kf_ + 1) * (4.0 + qmax)) N *= 2;
    std::vector<cplx> ep(N), em(N);
    TrigSeries qs{Kf_, q_};
    for (int j = 0; j < N; ++j) {
        const cplx qv = qs(double(j) / N);
        ep[j] = std::exp(qv);
        em[j] = std::exp(-qv);
    }
    lax_.ep = series_from_samples(ep);
    lax_.em = series_from_samples(em);
}

cplx Potential::q(double x) const { return TrigSeries{Kf_, q_}(x); }
cplx Potential::p(double x) const { return TrigSeries{Kf_, p_}(x); }

cplx Potential::qx(double x) const {
    TrigSeries s{Kf_, q_};
    for (int k = -Kf_; k <= Kf_; ++k) s.c[k + Kf_] *= cplx(0.0, 2.0 * pi * k);
    return s(x);
}

cplx Potential::Pp(double x) const {
    TrigSeries s{Kf_, p_};
    for (int k = -Kf_; k <= Kf_; ++k) s.c[k + Kf_] *= P_symbol(k);
    return s(x);
}

FieldSamples Potential::eval_fields() const {
    FieldSamples f;
    for (int j = 0; j < grid_; ++j) {
        const double x = double(j) / grid_;
        f.x.push_back(x);
        const cplx qv = q(x);
        f.q.push_back(qv);
        f.qx.push_back(qx(x));
        f.Pp.push_back(Pp(x));
        f.exp_q.push_back(std::exp(qv));
        f.exp_mq.push_back(std::exp(-qv));
    }
    return f;
}

Potential Potential::reflected() const {
    std::vector<cplx> q = q_;
    for (auto& c : q) c = -c;
    return Potential(real_, Kf_, q, p_, grid_);
}

Potential Potential::axpy(double eps, const Potential& w) const {
    const int K = std::max(Kf_, w.Kf_);
    std::vector<cplx> q(2 * K + 1), p(2 * K + 1);
    for (int k = -K; k <= K; ++k) {
        q[k + K] = q_coeff(k) + eps * w.q_coeff(k);
        p[k + K] = p_coeff(k) + eps * w.p_coeff(k);
    }
    return Potential(real_ && w.real_, K, q, p, std::max(grid_, 4 * std::max(K, 1)));
}

double Potential::l2_norm_coeffs() const {
    double s = 0.0;
    for (const auto& c : q_) s += std::norm(c);
    return std::sqrt(s);
}

std::string potential_to_json(const Potential& v) {
    nlohmann::json j;
    j["real"] = v.real();
    j["Kf"] = v.Kf();
    j["grid"] = v.grid();
    auto arr = [](const std::vector<cplx>& c) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& z : c) a.push_back({z.real(), z.imag()});
        return a;
    };
    j["q"] = arr(v.q_coeffs());
    j["p"] = arr(v.p_coeffs());
    return j.dump(2);
}

Potential potential_from_json(const std::string& text) {
    const nlohmann::json j = parse_json(text, "potential JSON");
    try {
        const bool real = j.value("real", false);
        const int Kf = j.at("Kf").get<int>();
        const int grid = j.value("grid", std::max(64, 4 * std::max(Kf, 1)));
        auto read = [&](const char* key) {
            std::vector<cplx> c;
            for (const auto& e : j.at(key)) c.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
            return c;
        };
        return Potential(real, Kf, read("q"), read("p"), grid);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("potential JSON: ") + e.what());
    }
}

Potential load_potential(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open potential file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return potential_from_json(ss.str());
}

}  // namespace sgl
