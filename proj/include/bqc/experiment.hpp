#pragma once

// Experiment configs, sweeps and reports.

#include "bqc/archimedean.hpp"
#include "bqc/errors.hpp"
#include "bqc/form_io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace bqc {

enum class ExperimentKind { verify_quadric_asymptotic, verify_biquadratic_sigma, thin_set, expsum_audit, density_audit };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct Tolerances {
    double ratio = 0.1;         // |N / prediction - 1| at the last sweep point
    double exponent = 0.1;      // fitted growth exponent
    double slope_slack = 0.3;   // added to the exponent-sum slope ceilings
    double envelope_C = 4.0;
    double envelope_eps = 0.25;
};

struct ExperimentConfig {
    std::string name;
    ExperimentKind kind = ExperimentKind::verify_quadric_asymptotic;
    std::filesystem::path form_path;
    std::vector<double> sweep;
    std::uint64_t seed = 1;
    double budget = 1e11;
    MonteCarloParams mc;
    i64 q_max = 40;
    i64 p_max = 40;
    std::vector<std::vector<i64>> c_vectors;  // expsum-audit frequencies
    std::vector<std::size_t> x_zero, y_zero;  // thin-set coordinates, 0-based
    Tolerances tol;
    std::filesystem::path output;

    // Throws SchemaError on an empty or non-increasing sweep or a nonpositive budget.
    void validate() const;
};

// A config file holds one experiment object or {"experiments": [...]}.
// Relative form paths resolve against `base_dir`.
std::vector<ExperimentConfig> parse_experiments(const std::string& text, const std::filesystem::path& base_dir,
                                                const std::string& source = "<config>");
std::vector<ExperimentConfig> load_experiments(const std::filesystem::path& path);

struct ReportRow {
    std::string operation;  // producing operation and its fixed parameters
    std::string parameter;  // swept parameter name
    double value = 0;       // swept parameter value
    double empirical = 0;
    double predicted = 0;
    double ratio = 0;       // empirical / predicted, 0 when predicted = 0
    double uncertainty = 0;
    std::string status = "ok";
};

struct Verdict {
    std::string name;
    double value = 0;
    double tolerance = 0;
    bool pass = false;
};

struct Report {
    std::string name;
    ExperimentKind kind = ExperimentKind::verify_quadric_asymptotic;
    std::uint64_t seed = 0;
    std::vector<ReportRow> rows;
    std::vector<std::pair<std::string, double>> fitted;
    std::vector<Verdict> verdicts;

    bool passed() const;
};

// Budget errors are recorded on the affected row and the run continues.
Report run_experiment(const ExperimentConfig& config);

// CSV without timing data, so equal configs give byte-identical output.
std::string csv_header();
std::string to_csv(const Report& report);
std::string summary_json(const std::vector<Report>& reports);

}  // namespace bqc
