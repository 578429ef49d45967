// sgl: spectra, canonical roots and normalized differentials of the sinh-Gordon Lax operator.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "sgl/json_io.hpp"
#include "sgl/verification.hpp"

using namespace sgl;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kInputError = 2, kNumericalError = 3 };

struct Common {
    std::string config_file, out, format, potential;
    int nmax = 0, K = 0, nodes = 0, threads = 0;
    double tol = 0.0;
    std::uint64_t seed = 0;
    CLI::Option *o_nmax{}, *o_K{}, *o_nodes{}, *o_threads{}, *o_tol{}, *o_seed{}, *o_format{};
};

void add_common(CLI::App* app, Common& c, bool potential_required) {
    app->add_option("--config", c.config_file, "JSON run configuration")->check(CLI::ExistingFile);
    c.o_nmax = app->add_option("--nmax", c.nmax, "stored spectrum indices |n| <= nmax");
    c.o_K = app->add_option("--K", c.K, "truncation of products and of the sigma unknowns");
    c.o_tol = app->add_option("--tol", c.tol, "integrator tolerance");
    c.o_nodes = app->add_option("--nodes", c.nodes, "contour quadrature nodes");
    c.o_threads = app->add_option("--threads", c.threads, "worker threads (default: available cores)");
    c.o_seed = app->add_option("--seed", c.seed, "seed for every random choice");
    app->add_option("--out", c.out, "output file (default stdout)");
    c.o_format = app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv", "table"}));
    auto* p = app->add_option("potential", c.potential,
                              "potential file, or zero | seeded[:SEED] | cos:AMP");
    if (potential_required) p->required();
}

RunConfig make_config(const Common& c) {
    RunConfig cfg;
    cfg.threads = int(std::max(1u, std::thread::hardware_concurrency()));
    if (!c.config_file.empty()) {
        std::ifstream in(c.config_file);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = config_from_json(ss.str(), cfg);
    }
    if (c.o_nmax->count()) cfg.N_max = c.nmax;
    if (c.o_K->count()) cfg.K = c.K;
    if (c.o_tol->count()) cfg.integrator_tol = c.tol;
    if (c.o_nodes->count()) cfg.nodes = c.nodes;
    if (c.o_threads->count()) cfg.threads = c.threads;
    if (c.o_seed->count()) cfg.seed = c.seed;
    if (c.o_format->count()) cfg.format = c.format;
    // a K left at its default follows a larger --nmax
    if (c.o_nmax->count() && !c.o_K->count() && cfg.K < cfg.N_max) cfg.K = cfg.N_max;
    if (cfg.threads < 1) throw InputError("--threads must be >= 1");
    cfg.validate();
    return cfg;
}

Potential make_potential(const std::string& spec) {
    if (spec == "zero") return Potential::zero();
    if (spec == "seeded") return Potential::seeded(0);
    auto number = [&](const std::string& s) {
        try {
            size_t pos = 0;
            const double x = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return x;
        } catch (const std::exception&) {
            throw InputError("bad number '" + s + "' in potential " + spec);
        }
    };
    if (spec.rfind("seeded:", 0) == 0) return Potential::seeded(std::uint64_t(number(spec.substr(7))));
    if (spec.rfind("cos:", 0) == 0) return Potential::cosine(number(spec.substr(4)));
    return load_potential(spec);
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw InputError("cannot write " + c.out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

cplx parse_lambda(const std::string& s) {
    const auto comma = s.find(',');
    try {
        size_t p1 = 0, p2 = 0;
        const std::string re = s.substr(0, comma);
        const double a = std::stod(re, &p1);
        double b = 0.0;
        if (comma != std::string::npos) {
            const std::string im = s.substr(comma + 1);
            b = std::stod(im, &p2);
            if (p2 != im.size()) throw std::invalid_argument(s);
        }
        if (p1 != re.size()) throw std::invalid_argument(s);
        return {a, b};
    } catch (const std::exception&) {
        throw InputError("--lambda expects re,im, got '" + s + "'");
    }
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

// ---- spectrum ----

int cmd_spectrum(const Common& c) {
    const RunConfig cfg = make_config(c);
    const Potential v = make_potential(c.potential);
    const auto t = build_table(v, cfg.N_max, cfg.spectrum_options());
    if (cfg.format == "json") {
        emit(c, table_to_json(t));
        return kOk;
    }
    std::ostringstream os;
    os << "n,quantity,re,im\n";
    for (const auto& e : t.entries) {
        const std::pair<const char*, cplx> rows[] = {{"lambda_minus", e.minus}, {"lambda_plus", e.plus},
                                                    {"mu", e.mu},           {"lambda_dot", e.lambda_dot},
                                                    {"tau", e.tau()},       {"gamma", e.gamma()}};
        for (const auto& [name, z] : rows) os << e.n << ',' << name << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << '\n';
    }
    os << "star,lambda_dot," << fmt(t.lambda_dot_star.real()) << ',' << fmt(t.lambda_dot_star.imag()) << '\n';
    emit(c, os.str());
    return kOk;
}

// ---- differentials ----

int cmd_differentials(const Common& c, const std::vector<int>& ns, const std::string& table_file) {
    const RunConfig cfg = make_config(c);
    const Potential v = make_potential(c.potential);
    const SpectrumTable t =
        table_file.empty() ? build_table(v, cfg.N_max, cfg.spectrum_options()) : table_from_json(read_file(table_file));
    if (t.N_max > cfg.K) throw InputError("table N_max exceeds K");
    const auto dopt = cfg.differential_options();
    const CanonicalRoots R(t, cfg.K);
    std::optional<CanonicalRoots> Rr;

    nlohmann::json sols = nlohmann::json::array();
    std::ostringstream csv;
    csv << "n,family,m,re,im,deviation\n";
    bool ok = true;
    for (const int n : ns) {
        SigmaSolution sol;
        NormalizationReport nr;
        if (n >= 0) {
            sol = solve_sigma(R, n, dopt);
            nr = verify_normalization(sol, R, cfg.normalization_mmax, dopt);
        } else {
            // psi_{-|n|} from the reflected potential's own table
            if (!Rr) Rr.emplace(build_table(v.reflected(), t.N_max, cfg.spectrum_options()), cfg.K);
            sol = solve_sigma(*Rr, -n, dopt);
            nr = verify_normalization(sol, R, cfg.normalization_mmax, dopt, true);
        }
        ok = ok && nr.max_deviation <= cfg.threshold("differentials.normalization");
        auto j = nlohmann::json::parse(solution_to_json(sol, nr.max_deviation));
        j["psi_index"] = n;
        sols.push_back(std::move(j));
        for (int fam : {1, 2})
            for (int m = -nr.mmax; m <= nr.mmax; ++m) {
                const cplx z = (fam == 1 ? nr.family1 : nr.family2)[m + nr.mmax];
                const bool target = fam == nr.target_family && m == nr.target_index;
                csv << n << ',' << fam << ',' << m << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << ','
                    << fmt(std::abs(z - (target ? 1.0 : 0.0))) << '\n';
            }
    }
    if (cfg.format == "csv") {
        emit(c, csv.str());
    } else {
        nlohmann::json out;
        out["solutions"] = std::move(sols);
        emit(c, out.dump(2));
    }
    return ok ? kOk : kCheckFailed;
}

// ---- gradients ----

int cmd_gradients(const Common& c, const std::string& lambda) {
    const RunConfig cfg = make_config(c);
    const Potential v = make_potential(c.potential);
    GradientSuiteOptions g;
    g.seed = cfg.seed;
    g.spectrum = cfg.spectrum_options();
    if (!lambda.empty()) g.lambda = parse_lambda(lambda);
    for (int n : g.periodic_n)
        if (locate_entry(v, n, g.spectrum).double_root) {
            std::cerr << "note: lambda_" << n << " is a double root, periodic kernels skipped\n";
            g.periodic_n.clear();
            break;
        }
    const auto checks = gradient_fd_suite(v, g);
    bool ok = true;
    for (const auto& x : checks) ok = ok && x.pass;
    if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& x : checks)
            arr.push_back({{"quantity", x.quantity}, {"n", x.n}, {"direction", x.direction},
                           {"analytic", cplx_to_json(x.analytic)}, {"fd", cplx_to_json(x.fd)},
                           {"rel_err", x.rel_err}, {"order_eps", x.order_eps}, {"order", x.order},
                           {"exact", x.exact}, {"pass", x.pass}});
        emit(c, nlohmann::json{{"passed", ok}, {"checks", arr}}.dump(2));
    } else {
        std::ostringstream os;
        os << "quantity,n,direction,analytic_re,analytic_im,fd_re,fd_im,rel_err,order_eps,order,exact,pass\n";
        for (const auto& x : checks)
            os << x.quantity << ',' << x.n << ',' << x.direction << ',' << fmt(x.analytic.real()) << ','
               << fmt(x.analytic.imag()) << ',' << fmt(x.fd.real()) << ',' << fmt(x.fd.imag()) << ','
               << fmt(x.rel_err) << ',' << x.order_eps << ',' << fmt(x.order) << ',' << x.exact << ',' << x.pass
               << '\n';
        emit(c, os.str());
    }
    return ok ? kOk : kCheckFailed;
}

// ---- verify ----

int cmd_verify(const Common& c, int corrupt_n) {
    const RunConfig cfg = make_config(c);
    SuiteOptions opt;
    if (corrupt_n >= 0) opt.corrupt = Corruption{corrupt_n, 0, 0.5};
    const auto reps = c.potential.empty() ? run_ensemble(cfg, opt) : run_suite(make_potential(c.potential), cfg, opt);
    if (cfg.format == "csv")
        emit(c, reports_to_csv(reps));
    else if (cfg.format == "table")
        emit(c, reports_to_table(reps));
    else
        emit(c, reports_to_json(reps));
    return all_passed(reps) ? kOk : kCheckFailed;
}

// ---- eval ----

int cmd_eval(const Common& c, const std::string& lambda) {
    const RunConfig cfg = make_config(c);
    const Potential v = make_potential(c.potential);
    const cplx l = parse_lambda(lambda);
    if (l == 0.0) throw InputError("lambda must be nonzero");
    IntegratorOptions io;
    io.tol = cfg.integrator_tol;
    const auto r = integrate(v, l, io);
    const auto t = build_table(v, cfg.N_max, cfg.spectrum_options());
    const CanonicalRoots R(t, cfg.K);
    const std::pair<const char*, cplx> rows[] = {{"Delta", r.Delta}, {"delta", r.delta}, {"Delta_dot", r.Delta_dot},
                                                {"chi_p", r.chi_p()}, {"chi_D", r.chi_D()},
                                                {"sqrt_c_chi_p", R.chip(l)}};
    if (cfg.format == "json") {
        nlohmann::json j;
        j["lambda"] = cplx_to_json(l);
        for (const auto& [k, z] : rows) j[k] = cplx_to_json(z);
        emit(c, j.dump(2));
    } else {
        std::ostringstream os;
        os << "quantity,re,im\n";
        for (const auto& [k, z] : rows) os << k << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << '\n';
        emit(c, os.str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra, canonical roots and normalized differentials of the sinh-Gordon Lax operator"};
    app.require_subcommand(1);

    Common c_spec, c_diff, c_grad, c_ver, c_eval;
    auto* spec = app.add_subcommand("spectrum", "periodic, Dirichlet and Delta_dot spectra");
    add_common(spec, c_spec, true);

    auto* diff = app.add_subcommand("differentials", "solve for sigma^n and check the normalization");
    add_common(diff, c_diff, true);
    std::vector<int> ns{0, 1, 2};
    std::string table_file;
    diff->add_option("--n", ns, "indices n (negative n: psi_{-|n|} via the reflected potential)")->delimiter(',');
    diff->add_option("--table", table_file, "spectrum JSON from `spectrum` instead of recomputing")
        ->check(CLI::ExistingFile);

    auto* grad = app.add_subcommand("gradients", "analytic gradients against central differences");
    add_common(grad, c_grad, true);
    std::string grad_lambda;
    grad->add_option("--lambda", grad_lambda, "spectral parameter re,im for the monodromy kernels");

    auto* ver = app.add_subcommand("verify", "full check suite (seeded ensemble without a potential)");
    add_common(ver, c_ver, false);
    int corrupt_n = -1;
    ver->add_option("--corrupt", corrupt_n, "negative control: push one sigma of solution n off its gap");

    auto* ev = app.add_subcommand("eval", "monodromy quantities and the canonical root at one lambda");
    add_common(ev, c_eval, true);
    std::string ev_lambda;
    ev->add_option("--lambda", ev_lambda, "re,im")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*spec) return cmd_spectrum(c_spec);
        if (*diff) return cmd_differentials(c_diff, ns, table_file);
        if (*grad) return cmd_gradients(c_grad, grad_lambda);
        if (*ver) return cmd_verify(c_ver, corrupt_n);
        if (*ev) return cmd_eval(c_eval, ev_lambda);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return kInputError;
}
