#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace sblab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string experiment = "all";
    std::vector<double> t;      // empty: each experiment's default grid
    std::string family;         // "", "gaussian" or "spline"
    std::vector<double> s;      // Gaussian widths; empty: {0.5, 1}
    double ell = 1.0;
    int n_lattice = 0;          // 0: tail-bound rule
    int m_modes = 0;
    int r_grid = 50;            // Chebyshev nodes for the analyticity check
    std::optional<double> tol;  // overrides every row tolerance
    std::string out;
    std::uint64_t seed = 20250101;

    void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_ids();

struct ReportRow {
    std::string experiment;
    nlohmann::json params;
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    double tolerance = 0.0;
    bool absolute = false;  // compared on abs_err (near-zero target)
    bool pass = false;
};

struct VerificationReport {
    std::string experiment;
    std::vector<ReportRow> rows;
    nlohmann::json diagnostics = nlohmann::json::object();
    double wall_ms = 0.0;

    // Records lhs against rhs. `scale` replaces |rhs| in the relative error
    // (sup-norm comparisons); targets below 1e-8 switch to absolute error.
    void add(nlohmann::json params, double lhs, double rhs, double tolerance, std::optional<double> scale = {});
    // Applies a tolerance override to every row.
    void override_tolerance(double tol);
    [[nodiscard]] bool all_pass() const;
    [[nodiscard]] int passed() const;
    [[nodiscard]] int failed() const;
};

VerificationReport verify_euclid_baseline(const ExperimentConfig& cfg);
VerificationReport verify_isometry_pc(const ExperimentConfig& cfg);
VerificationReport verify_isometry_ac(const ExperimentConfig& cfg);
VerificationReport verify_inversion_radial(const ExperimentConfig& cfg);
VerificationReport verify_inversion_general(const ExperimentConfig& cfg);
VerificationReport verify_unwrapping(const ExperimentConfig& cfg);
VerificationReport verify_intertwining(const ExperimentConfig& cfg);
VerificationReport verify_s3_compact(const ExperimentConfig& cfg);

/// Runs one experiment by id ("all" is not accepted here).
VerificationReport run_experiment(const std::string& id, const ExperimentConfig& cfg);

struct RunSummary {
    std::vector<VerificationReport> reports;
    double wall_ms = 0.0;
    [[nodiscard]] int passed() const;
    [[nodiscard]] int failed() const;
    [[nodiscard]] bool all_pass() const { return failed() == 0; }
};

/// Runs cfg.experiment (or every experiment for "all"); validates first.
RunSummary run_all(const ExperimentConfig& cfg);

std::string to_csv(const std::vector<VerificationReport>& reports);
nlohmann::json summary_json(const RunSummary& run, const ExperimentConfig& cfg);

/// Writes the CSV to cfg.out and the JSON summary next to it (<out>.json).
void write_outputs(const RunSummary& run, const ExperimentConfig& cfg);

} // namespace sblab
