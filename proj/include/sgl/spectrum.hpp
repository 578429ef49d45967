#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sgl/monodromy.hpp"
#include "sgl/quadrature.hpp"

namespace sgl {

// Zero potential periodic eigenvalue in D_n: root of omega(lambda) = n pi in C+.
// n >= 1: (n pi + sqrt(n^2 pi^2 + 1/4))/2, n = 0: 1/4, n < 0: 1/(16 s_{-n}).
double zero_root(int n);
// Signed tail value tau_{j,k}(0) used beyond the stored range: sign(k) s_|k|, 1/4 at k = 0.
double zero_tau(int k);
// s_k - k pi for k >= 1, without cancellation.
double zero_root_offset(int k);

struct DiscFamily {
    static cplx center(int n);
    static double radius(int n);
    static ContourSpec boundary(int n, int nodes = 32);
    // Radius of B_N, and of B_{-N}
    static double outer_radius(int N) { return N * pi + pi / 2; }
    static double inner_radius(int N) { return 1.0 / (16.0 * (N * pi + pi / 2)); }
    // Geometric distance between closures of D_m and D_n.
    static double distance(int m, int n);
};

struct SpectrumOptions {
    double tol = 1e-12;          // integrator tolerance
    int nodes = 32;              // contour nodes per disc
    double tol_double = 1e-10;   // gap estimate / radius of D_n below this => double root
    int max_newton = 40;
    int threads = 1;
};

// Values of the monodromy quantities needed for localization at one lambda.
struct SpectralSample {
    cplx lambda{}, Delta{}, Delta_dot{}, Delta_ddot{}, m2{}, m2_dot{};
};
SpectralSample spectral_sample(const Potential& v, cplx lambda, double tol);

struct SpectrumEntry {
    int n = 0;
    cplx minus{}, plus{}, mu{}, lambda_dot{};
    bool double_root = false;
    // Trace formula moments from the contour
    cplx trace_tau{}, trace_gamma2{};
    int count_periodic = 0, count_dirichlet = 0, count_delta_dot = 0;
    double count_distance = 0.0;  // worst distance of raw winding numbers from integers
    cplx Delta_at_lambda_dot{};

    cplx tau() const { return 0.5 * (plus + minus); }
    cplx gamma() const { return plus - minus; }
};

struct SpectrumTable {
    int N_max = 0;
    bool real = false;
    std::vector<SpectrumEntry> entries;  // index n + N_max
    cplx lambda_dot_star{};
    double tol = 0.0;

    const SpectrumEntry& at(int n) const;
    bool has(int n) const { return n >= -N_max && n <= N_max; }

    // Two-index views. sign = +1 selects lambda^+, -1 selects lambda^-.
    // Indices beyond the stored range return zero-potential values shifted by tail_shift / k.
    cplx lam(int j, int k, int sign) const;
    cplx tau(int j, int k) const { return 0.5 * (lam(j, k, +1) + lam(j, k, -1)); }
    cplx gamma(int j, int k) const { return lam(j, k, +1) - lam(j, k, -1); }
    cplx mu(int j, int k) const;
    cplx lambda_dot(int j, int k) const;

    enum class Node { Tau, Mu, Dot };
    // c in k (x_{j,k} - x_k(0)) = c + e/k^2, fitted at k = N_max and N_max/2; 0 if N_max < 2.
    cplx tail_shift(int j, Node node) const;
};

// Root localization for a single index n; throws NumericalError on count mismatch.
SpectrumEntry locate_entry(const Potential& v, int n, const SpectrumOptions& opt = {});
std::pair<cplx, cplx> locate_periodic(const Potential& v, int n, const SpectrumOptions& opt = {});
cplx locate_dirichlet(const Potential& v, int n, const SpectrumOptions& opt = {});
cplx locate_delta_dot(const Potential& v, int n, const SpectrumOptions& opt = {});
cplx locate_delta_dot_star(const Potential& v, const SpectrumOptions& opt = {});

SpectrumTable build_table(const Potential& v, int N_max, const SpectrumOptions& opt = {});

// Roots counted in the annulus A_N = B_N minus closure(B_{-N}).
struct AnnulusCount {
    int N = 0;
    int periodic = 0, dirichlet = 0, delta_dot = 0;
    int nodes_used = 0;
    double distance = 0.0;
};
AnnulusCount count_annulus(const Potential& v, int N, double tol = 1e-12);
// Smallest N in [1, N_limit] whose annulus counts equal 4+8N, 2+4N and 4+4N.
int choose_N_count(const Potential& v, int N_limit = 8, double tol = 1e-12);

struct TraceFormula {
    cplx tau{}, gamma2{};
};
TraceFormula trace_formula_tau(const Potential& v, int n, const ContourSpec& contour, double tol = 1e-12);

struct Disc {
    cplx center{};
    double radius = 0.0;
};

struct IsolatingNeighborhoods {
    int N_max = 0;
    std::vector<Disc> U;  // index n + N_max
    Disc U_star;
    double c = 1.0;       // achieved separation constant
    bool I1 = false, I2 = false, I4 = false, I5 = false;
    std::string failure;

    const Disc& at(int n) const { return U[n + N_max]; }
};

IsolatingNeighborhoods build_isolating(const SpectrumTable& table);

// Contour Gamma_{j,m}: circle around tau_{j,m} (lambda plane for j = 1, mu plane for j = 2)
// with radius rho * radius of D_|m|.
ContourSpec gamma_contour(const SpectrumTable& table, int j, int m, double rho, int nodes);

struct ReciprocityReport {
    double periodic = 0.0, dirichlet = 0.0, delta_dot = 0.0, delta_dot_star = 0.0;
    double max() const;
};
// |16 lambda_n^+-(q,p) lambda_{-n}^-+(-q,p) - 1| etc. for |n| <= nmax.
ReciprocityReport reciprocity(const SpectrumTable& t, const SpectrumTable& reflected, int nmax);

std::string table_to_json(const SpectrumTable& t);
SpectrumTable table_from_json(const std::string& text);

}  // namespace sgl
