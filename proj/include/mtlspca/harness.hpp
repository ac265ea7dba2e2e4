#pragma once

// Experiment drivers, result reports and the Monte-Carlo score oracle.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtlspca/datamodel.hpp"

namespace mtlspca {

struct ReportRow {
    double sweep_value = 0.0;
    std::string method;
    double theory_error = 0.0;     // NaN when no closed form applies
    double empirical_error = 0.0;  // mean over seeds, NaN for theory-only rows
    double std_error = 0.0;        // standard error of that mean
    double seconds = 0.0;
};

// CSV schema: sweep_value,method,theory_error,empirical_error,stderr,seconds,
// preceded by `# key: value` metadata lines.
struct ExperimentReport {
    std::string experiment;
    std::string sweep_variable;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<ReportRow> rows;

    std::vector<std::string> methods() const;  // in order of first appearance
    std::vector<ReportRow> curve(const std::string& method) const;
    const ReportRow& at(const std::string& method, double sweep_value) const;
    std::string meta(const std::string& key) const;  // empty if absent
    // Errors in [0, 1] (or NaN) and a strictly increasing grid per method.
    void validate() const;
};

void write_report(const ExperimentReport& report, std::ostream& out);
ExperimentReport parse_report(std::istream& in, const std::string& source);
void save_report(const ExperimentReport& report, const std::filesystem::path& path);
ExperimentReport load_report(const std::filesystem::path& path);

// Two-class tasks with class means -mu_t, +mu_t where
// mu_t = beta_t e_1 + sqrt(1 - beta_t^2) e_p. `per_class[t]` samples per class.
MixtureSpec binary_transfer_mixture(int dimension, const std::vector<int>& per_class,
                                    const std::vector<double>& betas);

// 10-class tasks with mu_tj = 2 beta_t e_j + 2 sqrt(1 - beta_t^2) e_{p-j}.
MixtureSpec multiclass_transfer_mixture(int dimension, int classes, const std::vector<int>& per_class,
                                        const std::vector<double>& betas);

struct Fig1Config {
    std::vector<int> dimensions{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    int per_class = 500;
    int test_samples = 1000;
    int seeds = 10;
    std::uint64_t seed = 0;
};

struct Fig2Config {
    int dimension = 100;
    int source_per_class = 1000;
    int target_per_class = 50;
    std::vector<double> betas{0.0,       1.0 / 9.0, 2.0 / 9.0, 3.0 / 9.0, 4.0 / 9.0,
                              5.0 / 9.0, 6.0 / 9.0, 7.0 / 9.0, 8.0 / 9.0, 1.0};
    int test_samples = 1000;
    int seeds = 10;
    std::uint64_t seed = 0;
};

struct Fig3Config {
    int dimension = 200;
    int target_per_class = 50;
    int source_per_class = 5;
    std::vector<int> task_counts{2, 4, 8, 16, 32, 64, 128, 256};
    int test_samples = 10000;
    int seeds = 10;
    std::uint64_t seed = 0;
};

struct Fig4Config {
    int dimension = 200;
    int classes = 10;
    std::vector<int> per_class{100, 100, 50};
    std::vector<double> betas{0.2, 0.4, 0.6};
    int target = 2;  // 0-based
    int test_per_class = 100;
    int seeds = 10;
    std::uint64_t seed = 0;
};

struct RuntimeConfig {
    std::vector<int> dimensions{16, 32, 64, 128, 256, 512, 1024, 2048};
    int repeats = 3;
    std::uint64_t seed = 0;
};

// PCA and SPCA on one task with mean e_1, swept over p.
ExperimentReport run_fig1(const Fig1Config& config);
// ST-SPCA, N-SPCA and MTL-SPCA on a two-task transfer problem, swept over beta.
ExperimentReport run_fig2(const Fig2Config& config);
// Same methods as the number of source tasks grows; source betas are uniform on [0, 1].
ExperimentReport run_fig3_synth(const Fig3Config& config);
// Multi-class, centered and uncentered, against the target task alone.
ExperimentReport run_fig4_synth(const Fig4Config& config);
// Wall-clock of MTL-SPCA fit + predict with n = 2p, two tasks, n_tj = p / 2.
ExperimentReport run_runtime_bench(const RuntimeConfig& config);

// Least-squares slope of log(seconds) against log(sweep_value) for rows of
// `method` with sweep_value >= min_value.
double scaling_exponent(const ExperimentReport& report, const std::string& method, double min_value);

struct OracleConfig {
    int trainings = 200;  // independent training sets
    int draws = 10000;    // test draws per group, spread over the training sets
    std::uint64_t seed = 0;
};

// Empirical law of projected test scores, groups x tau.
struct EmpiricalScoreLaw {
    Eigen::MatrixXd mean;
    Eigen::MatrixXd variance;
    Eigen::MatrixXd mean_stderr;
    long draws = 0;
};

// Matched-filter scores y^T X^T x / ||X y|| for binary labels `ytilde`.
EmpiricalScoreLaw monte_carlo_oracle(const MixtureSpec& spec, const Eigen::VectorXd& ytilde,
                                     const OracleConfig& config);

// Projections onto the tau leading eigenvectors of X X^T; each eigenvector's
// sign is aligned with the population means before averaging.
EmpiricalScoreLaw monte_carlo_pca_oracle(const MixtureSpec& spec, int tau, const OracleConfig& config);

// FNV-1a, used for the config hash in report metadata.
std::uint64_t fnv1a(const std::string& text);

}  // namespace mtlspca
