#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgl/differentials.hpp"
#include "sgl/gradients.hpp"

namespace sgl {

enum class CheckStatus { Pass, Fail, Skipped };
const char* status_name(CheckStatus s);

struct CheckReport {
    std::string check_id;
    CheckStatus status = CheckStatus::Skipped;
    double metric = 0.0;
    double threshold = 0.0;
    std::vector<std::pair<double, double>> trace;  // (K or N, metric)
    std::string reason;                            // why skipped or failed
};

// Every pass/fail threshold of the suite, keyed by check id (without ensemble prefix).
std::map<std::string, double> default_thresholds();

struct RunConfig {
    int N_max = 16;
    int K = 16;
    int nodes = 64;                // contour quadrature nodes of the differentials
    double newton_tol = 1e-9;
    int newton_max_iter = 20;
    double integrator_tol = 1e-12;
    std::map<std::string, double> thresholds = default_thresholds();
    std::uint64_t seed = 0;
    std::string format = "json";
    int threads = 1;

    // suite settings
    std::vector<int> product_K{8, 16, 24, 32};
    std::vector<int> sigma_n{0, 1, 2};
    int normalization_mmax = 10;
    int reciprocity_nmax = 6;
    int counting_N = 4;
    int interpolation_K = 24;
    int interpolation_points = 5;

    double threshold(const std::string& id) const;
    SpectrumOptions spectrum_options() const;
    DifferentialOptions differential_options() const;
    // Throws InputError on non-positive tolerances, K < N_max and similar.
    void validate() const;
};

// Merges the keys present in a JSON object into `base`. Unknown keys are an InputError;
// parse errors report line and column.
RunConfig config_from_json(const std::string& text, RunConfig base = {});
std::string config_to_json(const RunConfig& cfg);

// Moves sigma_{1,index} of solution n to lambda^+ + factor * gamma (beyond the gap).
struct Corruption {
    int n = 1;
    int index = 0;        // 0: the open gap with the largest gamma among k != n
    double factor = 0.5;
};

struct SuiteOptions {
    std::optional<Corruption> corrupt;
    bool gradients = true;
};

// All checks for one potential, sorted by check_id.
std::vector<CheckReport> run_suite(const Potential& v, const RunConfig& cfg, const SuiteOptions& opt = {});
// The fixed ensemble: seeded potentials with seeds cfg.seed .. cfg.seed + 2, ids prefixed "ensemble<i>.".
std::vector<CheckReport> run_ensemble(const RunConfig& cfg, const SuiteOptions& opt = {});

// Individual groups, usable on their own.
double interpolation_self_test(const SpectrumTable& t, int K, int points, std::uint64_t seed);

bool all_passed(const std::vector<CheckReport>& r);
std::string reports_to_json(const std::vector<CheckReport>& r);
std::string reports_to_csv(const std::vector<CheckReport>& r);
std::string reports_to_table(const std::vector<CheckReport>& r);

}  // namespace sgl
