#include "sgl/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "sgl/json_io.hpp"

#include "sgl/parallel.hpp"

namespace sgl {

double zero_root_offset(int k) {
    const double kp = k * pi;
    return 1.0 / (8.0 * (std::sqrt(kp * kp + 0.25) + kp));
}

double zero_root(int n) {
    if (n == 0) return 0.25;
    if (n > 0) return n * pi + zero_root_offset(n);
    return 1.0 / (16.0 * zero_root(-n));
}

double zero_tau(int k) {
    if (k == 0) return 0.25;
    return k > 0 ? zero_root(k) : -zero_root(-k);
}

cplx DiscFamily::center(int n) {
    if (n == 0) return 0.25;
    if (n > 0) return n * pi;
    const double c = -n * pi, r = pi / 3;
    return 0.5 * (1.0 / (16.0 * (c + r)) + 1.0 / (16.0 * (c - r)));
}

double DiscFamily::radius(int n) {
    if (n == 0) return 1.0 / (4.0 * pi);
    if (n > 0) return pi / 3;
    const double c = -n * pi, r = pi / 3;
    return 0.5 * (1.0 / (16.0 * (c - r)) - 1.0 / (16.0 * (c + r)));
}

ContourSpec DiscFamily::boundary(int n, int nodes) { return ContourSpec::circle(center(n), radius(n), nodes); }

double DiscFamily::distance(int m, int n) {
    return std::max(0.0, std::abs(center(m) - center(n)) - radius(m) - radius(n));
}

SpectralSample spectral_sample(const Potential& v, cplx lambda, double tol) {
    IntegratorOptions o;
    o.tol = tol;
    o.second_derivative = true;
    const auto r = integrate(v, lambda, o);
    return {lambda, r.Delta, r.Delta_dot, r.Delta_ddot, r.M.b, r.Md.b};
}

namespace {

struct ContourData {
    ContourNodes nodes;
    std::vector<cplx> chi, chi_d, m2, m2_d, dd, dd_d;
    double scale_dd = 0.0, scale_m2 = 0.0;
};

ContourData sample_contour(const Potential& v, const ContourSpec& c, double tol) {
    ContourData d;
    d.nodes = contour_nodes(c);
    const size_t N = d.nodes.z.size();
    d.chi.resize(N);
    d.chi_d.resize(N);
    d.m2.resize(N);
    d.m2_d.resize(N);
    d.dd.resize(N);
    d.dd_d.resize(N);
    for (size_t j = 0; j < N; ++j) {
        const auto s = spectral_sample(v, d.nodes.z[j], tol);
        d.chi[j] = s.Delta * s.Delta - 1.0;
        d.chi_d[j] = 2.0 * s.Delta * s.Delta_dot;
        d.m2[j] = s.m2;
        d.m2_d[j] = s.m2_dot;
        d.dd[j] = s.Delta_dot;
        d.dd_d[j] = s.Delta_ddot;
        d.scale_dd = std::max(d.scale_dd, std::abs(s.Delta_dot));
        d.scale_m2 = std::max(d.scale_m2, std::abs(s.m2));
    }
    return d;
}

std::string where(int n) {
    std::ostringstream os;
    os << "index n = " << n;
    return os.str();
}

int checked_count(const ContourNodes& nodes, const std::vector<cplx>& f, const std::vector<cplx>& fp, int expected,
                  const char* what, int n, double& dist) {
    RootCount rc;
    try {
        rc = count_roots(nodes, f, fp, 0.0);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("localization failure (") + what + ", " + where(n) + "): " + e.what());
    }
    if (rc.count != expected) {
        std::ostringstream os;
        os << "localization failure (" << what << ", " << where(n) << "): found " << rc.count << " roots, expected "
           << expected << "; outside working neighborhood";
        throw NumericalError(os.str());
    }
    dist = std::max(dist, rc.distance);
    return rc.count;
}

// Stops on a relative step near roundoff or when steps stop shrinking at noise level.
struct NewtonStop {
    double prev = INFINITY;
    bool operator()(cplx step, cplx z) {
        const double s = std::abs(step), a = std::abs(z);
        const bool done = s <= 4e-15 * a || (s <= 1e-11 * a && s > 0.5 * prev);
        prev = s;
        return done;
    }
};

// Newton on Delta_dot with Delta_ddot from the second variational equation.
cplx newton_delta_dot(const Potential& v, cplx z, const SpectrumOptions& opt, bool keep_real, bool keep_imag) {
    NewtonStop converged;
    for (int it = 0; it < opt.max_newton; ++it) {
        const auto s = spectral_sample(v, z, opt.tol);
        cplx step = s.Delta_dot / s.Delta_ddot;
        if (keep_real) step = step.real();
        if (keep_imag) step = cplx(0.0, step.imag());
        z -= step;
        if (converged(step, z)) return z;
    }
    return z;
}

cplx newton_m2(const Potential& v, cplx z, const SpectrumOptions& opt, bool keep_real) {
    IntegratorOptions o;
    o.tol = opt.tol;
    NewtonStop converged;
    for (int it = 0; it < opt.max_newton; ++it) {
        const auto r = integrate(v, z, o);
        cplx step = r.M.b / r.Md.b;
        if (keep_real) step = step.real();
        z -= step;
        if (converged(step, z)) return z;
    }
    return z;
}

// Delta - sigma evaluated as chi_p/(Delta + sigma) with chi_p = delta^2 + m2 m3, which
// stays accurate near a closed gap where M is close to sigma * I.
cplx level_deviation(const Mat2& M, double sigma) {
    const cplx Delta = 0.5 * (M.a + M.d), delta = 0.5 * (M.a - M.d);
    return (delta * delta + M.b * M.c) / (Delta + sigma);
}

cplx newton_level(const Potential& v, cplx z, double sigma, const SpectrumOptions& opt, bool keep_real) {
    IntegratorOptions o;
    o.tol = opt.tol;
    NewtonStop converged;
    for (int it = 0; it < opt.max_newton; ++it) {
        const auto r = integrate(v, z, o);
        cplx step = level_deviation(r.M, sigma) / r.Delta_dot;
        if (keep_real) step = step.real();
        z -= step;
        if (converged(step, z)) return z;
    }
    return z;
}

}  // namespace

SpectrumEntry locate_entry(const Potential& v, int n, const SpectrumOptions& opt) {
    const auto spec = DiscFamily::boundary(n, opt.nodes);
    const auto d = sample_contour(v, spec, opt.tol);
    SpectrumEntry e;
    e.n = n;
    double dist = 0.0;
    e.count_periodic = checked_count(d.nodes, d.chi, d.chi_d, 2, "periodic", n, dist);
    e.count_dirichlet = checked_count(d.nodes, d.m2, d.m2_d, 1, "Dirichlet", n, dist);
    e.count_delta_dot = checked_count(d.nodes, d.dd, d.dd_d, 1, "Delta_dot", n, dist);
    e.count_distance = dist;

    const cplx c = spec.center;
    const auto mp = root_moments(d.nodes, d.chi, d.chi_d, 2, c);
    e.trace_tau = c + 0.5 * mp[1];
    e.trace_gamma2 = 2.0 * mp[2] - mp[1] * mp[1];
    const cplx mu0 = c + root_moments(d.nodes, d.m2, d.m2_d, 1, c)[1];
    const cplx ld0 = c + root_moments(d.nodes, d.dd, d.dd_d, 1, c)[1];

    const bool re = v.real();
    e.lambda_dot = newton_delta_dot(v, re ? cplx(ld0.real()) : ld0, opt, re, false);
    e.mu = newton_m2(v, re ? cplx(mu0.real()) : mu0, opt, re);

    IntegratorOptions o2;
    o2.tol = opt.tol;
    o2.second_derivative = true;
    const auto s = integrate(v, e.lambda_dot, o2);
    if (std::abs(s.Delta_dot) > 1e-10 * std::max(1.0, d.scale_dd))
        throw NumericalError("Delta_dot root did not converge at " + where(n));
    e.Delta_at_lambda_dot = s.Delta;
    const double sigma = s.Delta.real() >= 0 ? 1.0 : -1.0;
    const cplx dev = level_deviation(s.M, sigma);
    // Quadratic model Delta ~ Delta(ld) + Delta_ddot h^2/2: gap estimate 2|h| relative to the disc size.
    const double gap_est = 2.0 * std::sqrt(std::abs(2.0 * dev / s.Delta_ddot));
    if (gap_est <= opt.tol_double * DiscFamily::radius(n)) {
        e.double_root = true;
        e.minus = e.plus = e.lambda_dot;
    } else {
        const cplx h = std::sqrt(-2.0 * dev / s.Delta_ddot);
        cplx a = e.lambda_dot - h, b = e.lambda_dot + h;
        // Real potentials in a real gap: the quadratic model gives a real h.
        const bool real_gap = re && std::abs(h.imag()) <= 1e-12 * std::abs(h);
        if (real_gap) {
            a = a.real();
            b = b.real();
        }
        a = newton_level(v, a, sigma, opt, real_gap);
        b = newton_level(v, b, sigma, opt, real_gap);
        if (precedes(a, b)) {
            e.minus = a;
            e.plus = b;
        } else {
            e.minus = b;
            e.plus = a;
        }
    }
    const double scale = std::max(1.0, std::abs(c));
    if (std::abs(e.tau() - e.trace_tau) > 1e-5 * scale)
        throw NumericalError("trace formula disagrees with root finding at " + where(n) +
                             ": contour or quadrature problem");
    return e;
}

std::pair<cplx, cplx> locate_periodic(const Potential& v, int n, const SpectrumOptions& opt) {
    const auto e = locate_entry(v, n, opt);
    return {e.minus, e.plus};
}

cplx locate_dirichlet(const Potential& v, int n, const SpectrumOptions& opt) { return locate_entry(v, n, opt).mu; }

cplx locate_delta_dot(const Potential& v, int n, const SpectrumOptions& opt) {
    return locate_entry(v, n, opt).lambda_dot;
}

cplx locate_delta_dot_star(const Potential& v, const SpectrumOptions& opt) {
    const auto spec = ContourSpec::circle(cplx(0.0, 0.25), 0.1, opt.nodes);
    const auto d = sample_contour(v, spec, opt.tol);
    double dist = 0.0;
    checked_count(d.nodes, d.dd, d.dd_d, 1, "Delta_dot star", 0, dist);
    cplx z = spec.center + root_moments(d.nodes, d.dd, d.dd_d, 1, spec.center)[1];
    // For real potentials the root sits on the imaginary axis.
    if (v.real()) z = cplx(0.0, z.imag());
    z = newton_delta_dot(v, z, opt, false, v.real());
    if (z.imag() < 0) z = -z;
    return z;
}

SpectrumTable build_table(const Potential& v, int N_max, const SpectrumOptions& opt) {
    if (N_max < 0) throw InputError("N_max must be non-negative");
    SpectrumTable t;
    t.N_max = N_max;
    t.real = v.real();
    t.tol = opt.tol;
    t.entries.resize(2 * N_max + 1);
    parallel_for(-N_max, N_max + 1, opt.threads, [&](int n) { t.entries[n + N_max] = locate_entry(v, n, opt); });
    t.lambda_dot_star = locate_delta_dot_star(v, opt);
    return t;
}

const SpectrumEntry& SpectrumTable::at(int n) const {
    if (!has(n)) throw InputError("spectrum index out of stored range");
    return entries[n + N_max];
}

cplx SpectrumTable::lam(int j, int k, int sign) const {
    if (std::abs(k) > N_max) return zero_tau(k) + tail_shift(j, Node::Tau) / double(k);
    if (j == 1) {
        if (k >= 0) return sign > 0 ? at(k).plus : at(k).minus;
        return -lam(1, -k, -sign);
    }
    if (k >= 0) {
        const auto& e = at(-k);
        return 1.0 / (16.0 * (sign > 0 ? e.minus : e.plus));
    }
    const auto& e = at(k);
    return -1.0 / (16.0 * (sign > 0 ? e.plus : e.minus));
}

cplx SpectrumTable::mu(int j, int k) const {
    if (std::abs(k) > N_max) return zero_tau(k) + tail_shift(j, Node::Mu) / double(k);
    if (j == 1) return k >= 0 ? at(k).mu : -at(-k).mu;
    return k >= 0 ? 1.0 / (16.0 * at(-k).mu) : -1.0 / (16.0 * at(k).mu);
}

cplx SpectrumTable::lambda_dot(int j, int k) const {
    if (std::abs(k) > N_max) return zero_tau(k) + tail_shift(j, Node::Dot) / double(k);
    if (j == 1) return k >= 0 ? at(k).lambda_dot : -at(-k).lambda_dot;
    return k >= 0 ? 1.0 / (16.0 * at(-k).lambda_dot) : -1.0 / (16.0 * at(k).lambda_dot);
}

cplx SpectrumTable::tail_shift(int j, Node node) const {
    if (N_max < 2) return 0.0;
    auto value = [&](int k) -> cplx {
        const auto& e = at(j == 1 ? k : -k);
        cplx x;
        switch (node) {
            case Node::Tau: x = j == 1 ? e.tau() : 0.5 * (1.0 / (16.0 * e.minus) + 1.0 / (16.0 * e.plus)); break;
            case Node::Mu: x = j == 1 ? e.mu : 1.0 / (16.0 * e.mu); break;
            case Node::Dot: x = j == 1 ? e.lambda_dot : 1.0 / (16.0 * e.lambda_dot); break;
        }
        return double(k) * (x - zero_tau(k));
    };
    const int N = N_max, M = N_max / 2;
    const double n2 = double(N) * N, m2 = double(M) * M;
    return (n2 * value(N) - m2 * value(M)) / (n2 - m2);
}

AnnulusCount count_annulus(const Potential& v, int N, double tol) {
    if (N < 1) throw InputError("annulus index must be >= 1");
    AnnulusCount out;
    out.N = N;
    auto count_on = [&](double R, int nodes, double& dist) {
        const auto d = sample_contour(v, ContourSpec::circle(0.0, R, nodes), tol);
        std::array<int, 3> c{};
        const std::vector<cplx>* f[3] = {&d.chi, &d.m2, &d.dd};
        const std::vector<cplx>* fp[3] = {&d.chi_d, &d.m2_d, &d.dd_d};
        for (int i = 0; i < 3; ++i) {
            cplx s{};
            for (size_t k = 0; k < d.nodes.z.size(); ++k) s += d.nodes.w[k] * (*fp[i])[k] / (*f[i])[k];
            const cplx raw = s / (2.0 * pi * I);
            c[i] = int(std::lround(raw.real()));
            dist = std::max(dist, std::abs(raw - cplx(c[i])));
        }
        return c;
    };
    // Node doubling until the winding numbers are unambiguous.
    for (int nodes = 128; nodes <= 8192; nodes *= 2) {
        double dist = 0.0;
        const auto outer = count_on(DiscFamily::outer_radius(N), nodes, dist);
        const auto inner = count_on(DiscFamily::inner_radius(N), nodes, dist);
        out.periodic = outer[0] - inner[0];
        out.dirichlet = outer[1] - inner[1];
        out.delta_dot = outer[2] - inner[2];
        out.nodes_used = nodes;
        out.distance = dist;
        if (dist < 0.05) return out;
    }
    throw NumericalError("annulus count did not settle; contour too coarse");
}

int choose_N_count(const Potential& v, int N_limit, double tol) {
    for (int N = 1; N <= N_limit; ++N) {
        const auto c = count_annulus(v, N, tol);
        if (c.periodic == 4 + 8 * N && c.dirichlet == 2 + 4 * N && c.delta_dot == 4 + 4 * N) return N;
    }
    throw NumericalError("counting lemma cutoff not found; potential outside working neighborhood");
}

TraceFormula trace_formula_tau(const Potential& v, int n, const ContourSpec& contour, double tol) {
    const auto d = sample_contour(v, contour, tol);
    double dist = 0.0;
    checked_count(d.nodes, d.chi, d.chi_d, 2, "periodic", n, dist);
    const auto m = root_moments(d.nodes, d.chi, d.chi_d, 2, contour.center);
    return {contour.center + 0.5 * m[1], 2.0 * m[2] - m[1] * m[1]};
}

IsolatingNeighborhoods build_isolating(const SpectrumTable& t) {
    IsolatingNeighborhoods iso;
    iso.N_max = t.N_max;
    iso.U.resize(t.entries.size());
    for (int n = -t.N_max; n <= t.N_max; ++n) iso.U[n + t.N_max] = {DiscFamily::center(n), DiscFamily::radius(n)};
    iso.U_star = {cplx(0.0, 0.25), 0.1};
    auto inside = [](const Disc& D, cplx z) { return std::abs(z - D.center) < D.radius; };

    iso.I1 = inside(iso.U_star, t.lambda_dot_star);
    for (int n = -t.N_max; n <= t.N_max && iso.I1; ++n) {
        const auto& e = t.at(n);
        const auto& D = iso.at(n);
        if (!(inside(D, e.minus) && inside(D, e.plus) && inside(D, e.mu) && inside(D, e.lambda_dot))) {
            iso.I1 = false;
            iso.failure = "(I-1) violated at " + where(n);
        }
    }
    // (I-2)/(I-3): distances scale like |m - n|; reciprocal images are compared in 1/(16 lambda).
    double c = 1.0;
    for (int m = 0; m <= t.N_max; ++m)
        for (int n = m + 1; n <= t.N_max; ++n) {
            const double dmn = DiscFamily::distance(m, n), k = n - m;
            c = std::max({c, k / dmn, dmn / k});
        }
    iso.c = c;
    iso.I2 = std::isfinite(c);
    iso.I4 = true;  // U_n = D_n for every stored n
    double d5 = INFINITY;
    for (int n = -t.N_max; n <= t.N_max; ++n) {
        const auto& D = iso.at(n);
        d5 = std::min(d5, std::abs(D.center - iso.U_star.center) - D.radius - iso.U_star.radius);
    }
    if (d5 > 0 && 1.0 / d5 > iso.c) iso.c = 1.0 / d5;
    iso.I5 = d5 > 0;
    if (!iso.I5 && iso.failure.empty()) iso.failure = "(I-5) violated";
    return iso;
}

ContourSpec gamma_contour(const SpectrumTable& t, int j, int m, double rho, int nodes) {
    const double R = DiscFamily::radius(std::abs(m));
    const double r = rho * R;
    const cplx tau = t.tau(j, m);
    const cplx gam = t.gamma(j, m);
    const cplx c = m >= 0 ? DiscFamily::center(m) : -DiscFamily::center(-m);
    if (std::abs(tau - c) + r >= R) throw NumericalError("contour leaves its isolating disc");
    if (r < 2.0 * std::abs(gam)) throw NumericalError("contour too close to gap for the standard-root series");
    return j == 1 ? ContourSpec::circle(tau, r, nodes) : ContourSpec::mu_circle(tau, r, nodes);
}

double ReciprocityReport::max() const { return std::max({periodic, dirichlet, delta_dot, delta_dot_star}); }

ReciprocityReport reciprocity(const SpectrumTable& t, const SpectrumTable& r, int nmax) {
    ReciprocityReport rep;
    nmax = std::min({nmax, t.N_max, r.N_max});
    for (int n = -nmax; n <= nmax; ++n) {
        const auto& a = t.at(n);
        const auto& b = r.at(-n);
        rep.periodic = std::max({rep.periodic, std::abs(16.0 * a.plus * b.minus - 1.0),
                                 std::abs(16.0 * a.minus * b.plus - 1.0)});
        rep.dirichlet = std::max(rep.dirichlet, std::abs(16.0 * a.mu * b.mu - 1.0));
        rep.delta_dot = std::max(rep.delta_dot, std::abs(16.0 * a.lambda_dot * b.lambda_dot - 1.0));
    }
    rep.delta_dot_star = std::abs(-16.0 * t.lambda_dot_star * r.lambda_dot_star - 1.0);
    return rep;
}

namespace {
nlohmann::json cj(cplx z) { return cplx_to_json(z); }
cplx jc(const nlohmann::json& j) { return cplx_from_json(j); }
}  // namespace

std::string table_to_json(const SpectrumTable& t) {
    nlohmann::json j;
    j["N_max"] = t.N_max;
    j["real"] = t.real;
    j["tol"] = t.tol;
    auto& lam = j["lambda"] = nlohmann::json::array();
    auto& mu = j["mu"] = nlohmann::json::array();
    auto& ld = j["lambda_dot"] = nlohmann::json::array();
    auto& tau = j["tau"] = nlohmann::json::array();
    auto& gam = j["gamma"] = nlohmann::json::array();
    for (const auto& e : t.entries) {
        lam.push_back({{"n", e.n}, {"minus", cj(e.minus)}, {"plus", cj(e.plus)}, {"double", e.double_root}});
        mu.push_back({{"n", e.n}, {"value", cj(e.mu)}});
        ld.push_back({{"n", e.n}, {"value", cj(e.lambda_dot)}});
        tau.push_back({{"n", e.n}, {"value", cj(e.tau())}});
        gam.push_back({{"n", e.n}, {"value", cj(e.gamma())}});
    }
    j["lambda_dot_star"] = cj(t.lambda_dot_star);
    return j.dump(2);
}

SpectrumTable table_from_json(const std::string& text) {
    SpectrumTable t;
    try {
        const auto j = parse_json(text, "spectrum JSON");
        t.N_max = j.at("N_max").get<int>();
        t.real = j.value("real", false);
        t.tol = j.value("tol", 0.0);
        t.entries.resize(2 * t.N_max + 1);
        const auto& lam = j.at("lambda");
        const auto& mu = j.at("mu");
        const auto& ld = j.at("lambda_dot");
        if (lam.size() != t.entries.size() || mu.size() != t.entries.size() || ld.size() != t.entries.size())
            throw InputError("spectrum JSON arrays do not match N_max");
        for (size_t i = 0; i < t.entries.size(); ++i) {
            auto& e = t.entries[i];
            e.n = lam[i].at("n").get<int>();
            if (e.n != int(i) - t.N_max) throw InputError("spectrum JSON entries out of order");
            e.minus = jc(lam[i].at("minus"));
            e.plus = jc(lam[i].at("plus"));
            e.double_root = lam[i].value("double", false);
            e.mu = jc(mu[i].at("value"));
            e.lambda_dot = jc(ld[i].at("value"));
        }
        t.lambda_dot_star = jc(j.at("lambda_dot_star"));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("spectrum JSON: ") + e.what());
    }
    return t;
}

}  // namespace sgl
